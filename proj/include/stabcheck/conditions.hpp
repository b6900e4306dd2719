#ifndef STABCHECK_CONDITIONS_HPP
#define STABCHECK_CONDITIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "stabcheck/field.hpp"
#include "stabcheck/sublevel.hpp"
#include "stabcheck/system.hpp"

namespace stabcheck {

struct ConditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Verdict { Holds, Fails, Unknown };

std::string to_string(Verdict v);

/// Tri-state verdict. Holds for sampling-quantified conditions is scoped to
/// the tested grid/family; Fails always carries a machine-checkable witness;
/// Unknown records the limiting reason.
struct ConditionVerdict {
    std::string condition;
    Verdict status = Verdict::Unknown;
    std::string certificate;          // reason / scope / witness description
    std::vector<double> witness_v;    // unreachable target (brockett/adversary)
    double witness_bound = 0.0;       // certified positive bound backing a Fails
    double delta = 0.0;
    int resolution = 0;
};

// ----------------------------- Brockett -----------------------------

/// Grid of target vectors ||v|| <= delta; every target certified reachable by
/// f(x,u) = v -> Holds (grid-scoped); some target certified unreachable
/// (interval lower bound on min ||f - v|| > 0 over the whole box) -> Fails.
ConditionVerdict check_brockett(const ControlSystemSpec& sys, const TargetSet& A, double delta,
                                const IntervalBox& state_box, int resolution = 32);

/// Re-verifies a Fails witness independently: certifies min ||f - v|| > 0.
bool recheck_brockett_witness(const ControlSystemSpec& sys, const IntervalBox& state_box,
                              const std::vector<double>& v, double claimed_bound);

// ----------------------------- adversary -----------------------------

enum class AdversaryFamily { Constant, DisjointnessProbe, UserFields };

ConditionVerdict check_adversary(const ControlSystemSpec& sys, const TargetSet& A, double delta,
                                 AdversaryFamily family, const IntervalBox& state_box,
                                 const std::vector<VectorFieldSpec>& user_fields = {},
                                 int resolution = 32);

// ----------------------------- Coron / Mansouri -----------------------------

/// One tested cycle in the nonzero part of the system's image: a state cycle
/// (loop for n=2, sphere mesh for n=3) together with a control section
/// u(x), or a fully parametric loop x(t), u(t) over t in [0,1] (n=2).
struct CycleSpec {
    std::string description;
    bool parametric = false;
    LoopCycle loop;                      // n == 2, non-parametric
    SurfaceMesh sphere;                  // n == 3
    std::vector<ExprPtr> section;        // u_j(x1..xn)
    std::vector<ExprPtr> state_of_t;     // parametric: x_i(t)
    std::vector<ExprPtr> control_of_t;   // parametric: u_j(t)
};

/// Degree of x -> f(x, u(x)) per cycle; d = gcd. A certified lower bound
/// (sub-subgroup) of the image subgroup. Cycles on which f vanishes are
/// rejected with ConditionError.
SubgroupImage coron_image_subgroup(const ControlSystemSpec& sys,
                                   const std::vector<CycleSpec>& cycles);

/// Certificate that the image of f stays inside the complement of an open
/// cone around a coordinate axis (minus the origin): whenever it holds, the
/// image subgroup in H_{n-1} of the punctured space is trivial (n=3).
struct AvoidanceCertificate {
    bool valid = false;
    int axis = -1;        // avoided dynamics component
    double kappa = 0.0;   // ||f_perp|| >= kappa * |f_axis| certified
    double scale_floor = 0.0;  // smallest control scale covered (0 = all, by homogeneity)
    std::string note;
};

/// Tries to certify ||f_perp|| >= kappa*|f_axis| on dyadic control annuli;
/// a declared control homogeneity extends the bound to all scales.
AvoidanceCertificate image_avoidance_certificate(const ControlSystemSpec& sys, int axis,
                                                 const IntervalBox& state_box, double kappa,
                                                 int levels = 20);

ConditionVerdict check_mansouri(const ControlSystemSpec& sys, const TargetSet& A,
                                const std::vector<CycleSpec>& cycles,
                                const std::optional<AvoidanceCertificate>& avoidance = {});

// ----------------------------- homology condition -----------------------------

/// Euclidean-specialization homology check: validates G_ref with the given
/// Lyapunov data, computes the left side chi* Z (cross-checked against
/// deg(G_ref) on the extracted boundary), and compares with the image
/// subgroup from the cycles.
ConditionVerdict check_homology_euclidean(const ControlSystemSpec& sys, const TargetSet& A,
                                          const VectorFieldSpec& G_ref,
                                          const LyapunovSpec& lyap,
                                          const std::vector<CycleSpec>& cycles,
                                          const std::optional<AvoidanceCertificate>& avoidance = {},
                                          int resolution = 32);

// ----------------------------- audit -----------------------------

struct AuditInstance {
    ControlSystemSpec sys;
    TargetSet A;
    std::optional<VectorFieldSpec> G_ref;
    std::optional<LyapunovSpec> lyap;
    std::vector<CycleSpec> cycles;
    std::optional<AvoidanceCertificate> avoidance;
    AdversaryFamily family = AdversaryFamily::Constant;
    double delta = 0.1;
    IntervalBox state_box{std::vector<Interval>{}};
    int resolution = 32;
};

struct AuditRecord {
    std::string name;
    ConditionVerdict brockett, adversary, mansouri, homology;
    long coron_d = 0;
    bool gate_applicable = false;   // vector bundle, orientable, chi != 0
};

struct AuditReport {
    std::vector<AuditRecord> records;
    std::vector<std::string> contradictions;          // toolkit failures
    std::vector<std::string> independence_witnesses;  // fiber bundles with (Holds, Fails)
    std::vector<std::string> inconclusive;
};

AuditReport audit_implications(const std::vector<AuditInstance>& instances);

} // namespace stabcheck

#endif

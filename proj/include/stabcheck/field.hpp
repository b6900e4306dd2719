#ifndef STABCHECK_FIELD_HPP
#define STABCHECK_FIELD_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stabcheck/expr.hpp"
#include "stabcheck/interval.hpp"

namespace stabcheck {

struct DegreeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vector field on R^n given by one expression per component in x1..xn.
struct VectorFieldSpec {
    std::size_t dimension = 0;
    std::vector<ExprPtr> components;

    static VectorFieldSpec parse(std::size_t n, const std::vector<std::string>& texts);
    static VectorFieldSpec from_asts(std::vector<ExprPtr> comps);

    std::vector<double> eval(const std::vector<double>& x) const;
    double norm_at(const std::vector<double>& x) const;

    /// Componentwise interval enclosure over a box.
    std::vector<Interval> enclosure(const IntervalBox& box, bool* unbounded = nullptr) const;

    /// Upper bound on the map's Lipschitz constant over the box (Frobenius
    /// bound from per-component gradient enclosures); infinity when a domain
    /// violation or non-smooth node blocks certification.
    double lipschitz(const IntervalBox& box, bool* heuristic = nullptr) const;
};

enum class CertStatus { Certified, Heuristic };

struct DegreeResult {
    long degree = 0;
    CertStatus status = CertStatus::Heuristic;
    double min_norm = 0.0;      // least field norm seen on the cycle
    std::size_t resolution = 0; // segments or triangles actually used
};

/// Closed oriented polyline in R^2 (implicit edge from back to front).
struct LoopCycle {
    std::vector<std::array<double, 2>> vertices;
};

/// Oriented closed triangle mesh in R^3 (outward orientation convention).
struct SurfaceMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;
};

LoopCycle make_circle_loop(std::array<double, 2> center, double radius, std::size_t segments);
LoopCycle reversed(const LoopCycle& loop);
SurfaceMesh make_icosphere(std::array<double, 3> center, double radius, int level);
SurfaceMesh make_box_surface(const IntervalBox& box);  // 12 outward triangles
SurfaceMesh refined(const SurfaceMesh& mesh);          // global 4-way split

/// Accumulated-angle winding number of a 2-D field along a closed polyline.
/// Certified when per-segment variation (Lipschitz x length) stays below the
/// field min-norm; segments are midpoint-refined up to depth_cap first.
DegreeResult winding_number(const VectorFieldSpec& field, const LoopCycle& loop,
                            int depth_cap = 12);

/// Winding number of a closed parametric map t in [0,1] -> (x(t), y(t)) != 0,
/// components as expressions in the single variable "t". Fully certified via
/// per-subinterval Lipschitz bounds in t.
DegreeResult winding_number_param(const ExprPtr& x_of_t, const ExprPtr& y_of_t,
                                  std::size_t initial_segments = 64, int depth_cap = 12);

/// Heuristic winding from precomputed nonzero samples along a closed loop.
DegreeResult winding_from_samples(const std::vector<std::array<double, 2>>& values);

/// Degree of x -> field(x)/|field(x)| from an oriented closed surface to S^2,
/// by signed solid-angle accumulation; global mesh refinement until the
/// per-triangle no-wraparound bound holds or the depth cap is hit.
DegreeResult mapping_degree(const VectorFieldSpec& field, const SurfaceMesh& sphere,
                            int depth_cap = 12);

struct ZeroCertificate {
    IntervalBox box;
    bool certified = false;      // exactly one zero in the box
    std::optional<long> index;   // local index if computed
    std::string note;
};

/// Krawczyk contraction test: true certifies exactly one zero of the field
/// inside the box.
bool krawczyk_unique_zero(const VectorFieldSpec& field, const IntervalBox& X);

/// Interval subdivision zero localization; certified clusters carry boundary
/// degree +-1 and a successful Krawczyk contraction.
std::vector<ZeroCertificate> locate_zeros(const VectorFieldSpec& field, const IntervalBox& box,
                                          int resolution, int depth_cap = 12);

/// Index of the field at a certified isolated zero; the surrounding cycle is
/// kept clear of the other certificates.
long field_index(const VectorFieldSpec& field, const ZeroCertificate& zero,
                 const std::vector<ZeroCertificate>& all_zeros = {});

struct PoincareHopfAudit {
    bool conclusive = false;
    bool pass = false;
    long long chi = 0;
    long index_sum = 0;
    std::vector<std::string> notes;
};

class SimplicialComplex;

/// Checks sum of indices = chi on a triangulated planar region with boundary.
/// domain_box must contain the region; the field must be nonzero and inward
/// on the boundary.
PoincareHopfAudit poincare_hopf_audit(const VectorFieldSpec& field, const SimplicialComplex& region,
                                      const IntervalBox& domain_box, int resolution = 32);

struct HomotopyCertificate {
    bool certified = false;
    std::vector<IntervalBox> refused_cells;  // refusal, not disproof
};

/// Certifies t*F + (1-t)*G != 0 for all t in [0,1] over every cell: the two
/// enclosures must share an open half-space.
HomotopyCertificate homotopy_nonvanishing(const VectorFieldSpec& F, const VectorFieldSpec& G,
                                          const std::vector<IntervalBox>& cells,
                                          int depth_cap = 6);

/// Cells covering an annulus r_inner <= |x| <= r_outer (boxes meeting the
/// annulus from a grid over the outer square).
std::vector<IntervalBox> annulus_cells(double r_inner, double r_outer, int resolution);

/// deg(b) - deg(a) on the loop: the oriented coincidence count of the two
/// circle maps.
long coincidence_number(const VectorFieldSpec& a, const VectorFieldSpec& b, const LoopCycle& loop);

/// Homology class of the field along the oriented boundary of S inside the
/// (trivialized) nonzero tangent bundle: base coefficient is always 1, fiber
/// coefficient is the winding number.
struct BoundaryClassPair {
    long base = 1;
    long fiber = 0;
    CertStatus status = CertStatus::Heuristic;
};
BoundaryClassPair boundary_class_pair(const VectorFieldSpec& field, const LoopCycle& boundary);

} // namespace stabcheck

#endif

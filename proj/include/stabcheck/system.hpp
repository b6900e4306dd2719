#ifndef STABCHECK_SYSTEM_HPP
#define STABCHECK_SYSTEM_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "stabcheck/expr.hpp"
#include "stabcheck/field.hpp"
#include "stabcheck/interval.hpp"
#include "stabcheck/simplicial.hpp"

namespace stabcheck {

struct SystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BundleKind { TrivialVector, VectorBundleDeclared, FiberSampled };

/// Control system x' = f(x, u) with dynamics components in x1..xn, u1..um.
/// For fiber-sampled systems u1..um parametrize the (non-product) fiber and
/// the control box is the parameter box.
struct ControlSystemSpec {
    std::string name;
    std::size_t state_dim = 0;
    std::size_t control_dim = 0;
    BundleKind bundle_kind = BundleKind::TrivialVector;
    bool orientable_state = true;
    std::vector<ExprPtr> dynamics;
    IntervalBox control_box{std::vector<Interval>{}};
    /// Declared fiberwise norm lower bound (e.g. unit-norm fibers); < 0 when
    /// not declared. Metadata used by reports, verified by fiber_min_norm.
    double declared_fiber_norm = -1.0;
    /// Declared positive homogeneity degree in u (f(x, s*u) = s^k f(x, u));
    /// < 0 when not declared. Lets box certificates extend to all scales.
    int control_homogeneity = -1;

    static ControlSystemSpec parse(std::string name, std::size_t n, std::size_t m,
                                   BundleKind kind, const std::vector<std::string>& dyn_texts,
                                   const IntervalBox& control_box);
};

/// Componentwise evaluation of f at (x, u); u must lie in the control box.
std::vector<double> evaluate_dynamics(const ControlSystemSpec& sys,
                                      const std::vector<double>& x,
                                      const std::vector<double>& u);

/// Certified lower bound on inf ||f(x,u)|| over x in region, u in the
/// control box, by branch and bound on the joint box. 0 is always sound.
double fiber_min_norm(const ControlSystemSpec& sys, const IntervalBox& region, int budget = 4000);

enum class TargetKind { Point, Triangulated, Hypersurface };

/// Target set A: a point, a triangulated compactum, or a closed oriented
/// hypersurface bounding a compact domain.
struct TargetSet {
    TargetKind kind = TargetKind::Point;
    std::vector<double> point;
    SimplicialComplex shape;  // triangulated set or hypersurface mesh

    static TargetSet make_point(std::vector<double> p);
    static TargetSet make_triangulated(SimplicialComplex c);
    static TargetSet make_hypersurface(SimplicialComplex c);
};

long long chi_of_target(const TargetSet& A);

/// Compact domain bounded by a hypersurface target.
struct BoundedDomain {
    SimplicialComplex region;  // triangles (n=2) or path tetrahedra (n=3)
    long long chi = 0;         // alternating cell count of the grid region
};

/// Fills the interior of a closed connected embedded hypersurface by
/// ray-casting parity over a uniform grid.
BoundedDomain bounded_domain(const TargetSet& A, int resolution = 32);

/// Subgroup d*Z of H_{n-1} of the punctured space generated by the degrees
/// of the tested cycles (d = gcd; empty set gives d = 0).
struct SubgroupImage {
    long d = 0;
    std::vector<std::pair<std::string, long>> cycles;  // description, degree

    void add(std::string description, long degree);
};

} // namespace stabcheck

#endif

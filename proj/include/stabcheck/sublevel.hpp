#ifndef STABCHECK_SUBLEVEL_HPP
#define STABCHECK_SUBLEVEL_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "stabcheck/expr.hpp"
#include "stabcheck/field.hpp"
#include "stabcheck/interval.hpp"
#include "stabcheck/simplicial.hpp"

namespace stabcheck {

struct SublevelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Candidate Lyapunov function V >= 0 with a sublevel threshold c > 0,
/// studied inside a bounding box.
struct LyapunovSpec {
    ExprPtr V;
    double level = 1.0;
    IntervalBox domain{std::vector<Interval>{}};

    static LyapunovSpec parse(const std::string& v_text, std::size_t dimension, double level,
                              const IntervalBox& domain);
    std::size_t dimension() const { return domain.dims.size(); }
    /// Gradient as a vector field (symbolic partials).
    VectorFieldSpec gradient() const;
};

/// Extracted contour V = c: closed oriented polylines (n=2) or a closed
/// oriented triangle mesh (n=3). Orientation follows the outward normal
/// (aligned with grad V): planar loops run counterclockwise around the
/// enclosed sublevel material.
struct SublevelBoundary {
    std::size_t dimension = 0;
    std::vector<LoopCycle> loops;  // n == 2
    SurfaceMesh mesh;              // n == 3
    int resolution = 0;
    double cell_size = 0.0;
    bool regular_value_certified = false;  // grad V bounded away from 0 on crossing cells
};

/// Marching-squares / tetrahedral contouring of V = c over a uniform grid.
/// Throws SublevelError when the level set reaches the domain box boundary
/// (the sublevel set would not be compactly contained).
SublevelBoundary extract_sublevel_boundary(const LyapunovSpec& spec, int resolution);

struct DecreaseReport {
    bool certified = false;
    double worst_upper = 0.0;  // largest certified upper bound of grad V . G
    std::vector<IntervalBox> inconclusive;
};

/// Certifies grad V . G < 0 wherever eps <= V <= c in the domain box.
/// eps < 0 selects the default c/100.
DecreaseReport verify_lyapunov(const LyapunovSpec& spec, const VectorFieldSpec& G,
                               double eps = -1.0, int resolution = 32, int depth_cap = 8);

/// Certifies grad V . G < 0 on a one-cell-wide tube around the extracted
/// boundary, i.e. G points into the sublevel set.
DecreaseReport inward_decrease(const LyapunovSpec& spec, const VectorFieldSpec& G,
                               const SublevelBoundary& boundary, int depth_cap = 8);
bool inward_check(const VectorFieldSpec& G, const SublevelBoundary& boundary,
                  const LyapunovSpec& spec);

/// Triangulation of the grid cells fully inside the sublevel set (n=2 only);
/// its homology approximates that of V^{-1}([0,c]).
SimplicialComplex filled_region_complex(const LyapunovSpec& spec, int resolution);

/// Boundary as a simplicial complex (edges for n=2, triangles for n=3) for
/// export in the mesh text format.
SimplicialComplex boundary_complex(const SublevelBoundary& boundary);

} // namespace stabcheck

#endif

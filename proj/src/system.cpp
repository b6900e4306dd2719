#include "stabcheck/system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace stabcheck {

ControlSystemSpec ControlSystemSpec::parse(std::string name, std::size_t n, std::size_t m,
                                           BundleKind kind,
                                           const std::vector<std::string>& dyn_texts,
                                           const IntervalBox& control_box) {
    if (dyn_texts.size() != n)
        throw SystemError("expected " + std::to_string(n) + " dynamics components, got " +
                          std::to_string(dyn_texts.size()));
    if (control_box.dims.size() != m)
        throw SystemError("control box dimension does not match the control dimension");
    ControlSystemSpec sys;
    sys.name = std::move(name);
    sys.state_dim = n;
    sys.control_dim = m;
    sys.bundle_kind = kind;
    const auto vars = state_control_vars(n, m);
    for (const auto& text : dyn_texts) sys.dynamics.push_back(parse_expression(text, vars));
    sys.control_box = control_box;

    if (kind == BundleKind::TrivialVector) {
        // the zero section must be admissible and evaluable
        if (!sys.control_box.contains(std::vector<double>(m, 0.0)))
            throw SystemError("trivial bundle requires u=0 inside the control box");
        std::map<std::string, double> b;
        for (std::size_t i = 0; i < n; ++i) b["x" + std::to_string(i + 1)] = 0.0;
        for (std::size_t j = 0; j < m; ++j) b["u" + std::to_string(j + 1)] = 0.0;
        for (const auto& c : sys.dynamics) evaluate(c, b);
    }
    return sys;
}

std::vector<double> evaluate_dynamics(const ControlSystemSpec& sys, const std::vector<double>& x,
                                      const std::vector<double>& u) {
    if (x.size() != sys.state_dim) throw SystemError("state point dimension mismatch");
    if (u.size() != sys.control_dim) throw SystemError("control point dimension mismatch");
    if (!sys.control_box.contains(u))
        throw SystemError("control value lies outside the declared control box");
    std::map<std::string, double> b;
    for (std::size_t i = 0; i < x.size(); ++i) b["x" + std::to_string(i + 1)] = x[i];
    for (std::size_t j = 0; j < u.size(); ++j) b["u" + std::to_string(j + 1)] = u[j];
    std::vector<double> out;
    for (const auto& c : sys.dynamics) out.push_back(evaluate(c, b));
    return out;
}

double fiber_min_norm(const ControlSystemSpec& sys, const IntervalBox& region, int budget) {
    if (region.dims.size() != sys.state_dim) throw SystemError("region dimension mismatch");
    const auto vars = state_control_vars(sys.state_dim, sys.control_dim);

    std::vector<Interval> joint = region.dims;
    for (const auto& d : sys.control_box.dims) joint.push_back(d);

    // only split along variables the dynamics actually mention
    std::set<std::string> used;
    for (const auto& c : sys.dynamics)
        for (const auto& v : free_variables(c)) used.insert(v);
    std::vector<std::size_t> splittable;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (used.count(vars[i])) splittable.push_back(i);

    auto norm2_low = [&](const IntervalBox& box) {
        double low = 0;
        for (const auto& c : sys.dynamics) {
            auto r = interval_evaluate(c, box, vars);
            if (r.unbounded) return 0.0;
            low += r.value.mig() * r.value.mig();
        }
        return low;
    };

    // branch and bound: always split the box with the least certified lower
    // bound; the minimum over leaves is a sound lower bound for the infimum
    using Node = std::pair<double, IntervalBox>;
    auto cmp = [](const Node& a, const Node& b) { return a.first > b.first; };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
    heap.push({norm2_low(IntervalBox(joint)), IntervalBox(joint)});
    for (int it = 0; it < budget && !heap.empty() && !splittable.empty(); ++it) {
        auto [low, box] = heap.top();
        std::size_t dim = splittable[0];
        for (std::size_t i : splittable)
            if (box.dims[i].width() > box.dims[dim].width()) dim = i;
        if (low > 0 && box.dims[dim].width() < 1e-9) break;
        heap.pop();
        auto halves = box.split(dim);
        heap.push({norm2_low(halves.first), halves.first});
        heap.push({norm2_low(halves.second), halves.second});
    }
    return heap.empty() ? 0.0 : std::sqrt(std::max(0.0, heap.top().first));
}

TargetSet TargetSet::make_point(std::vector<double> p) {
    TargetSet t;
    t.kind = TargetKind::Point;
    t.point = std::move(p);
    return t;
}

TargetSet TargetSet::make_triangulated(SimplicialComplex c) {
    TargetSet t;
    t.kind = TargetKind::Triangulated;
    t.shape = std::move(c);
    return t;
}

TargetSet TargetSet::make_hypersurface(SimplicialComplex c) {
    if (c.coordinates().empty())
        throw SystemError("hypersurface target requires embedded coordinates");
    TargetSet t;
    t.kind = TargetKind::Hypersurface;
    t.shape = std::move(c);
    return t;
}

long long chi_of_target(const TargetSet& A) {
    if (A.kind == TargetKind::Point) return 1;
    return A.shape.euler_characteristic();
}

namespace {

// ---- geometric predicates for the embedding check and parity fill ----

bool segments_cross(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& c, const std::vector<double>& d) {
    auto orient = [](const std::vector<double>& p, const std::vector<double>& q,
                     const std::vector<double>& r) {
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

// Moeller-Trumbore ray/triangle crossing (returns t > 0 hit)
bool ray_hits_triangle(const std::array<double, 3>& origin, const std::array<double, 3>& dir,
                       const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<double>& c) {
    const double e1[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double e2[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const double p[3] = {dir[1] * e2[2] - dir[2] * e2[1], dir[2] * e2[0] - dir[0] * e2[2],
                         dir[0] * e2[1] - dir[1] * e2[0]};
    const double det = e1[0] * p[0] + e1[1] * p[1] + e1[2] * p[2];
    if (std::abs(det) < 1e-14) return false;
    const double inv = 1.0 / det;
    const double tv[3] = {origin[0] - a[0], origin[1] - a[1], origin[2] - a[2]};
    const double u = (tv[0] * p[0] + tv[1] * p[1] + tv[2] * p[2]) * inv;
    if (u < 0 || u > 1) return false;
    const double q[3] = {tv[1] * e1[2] - tv[2] * e1[1], tv[2] * e1[0] - tv[0] * e1[2],
                         tv[0] * e1[1] - tv[1] * e1[0]};
    const double v = (dir[0] * q[0] + dir[1] * q[1] + dir[2] * q[2]) * inv;
    if (v < 0 || u + v > 1) return false;
    const double t = (e2[0] * q[0] + e2[1] * q[1] + e2[2] * q[2]) * inv;
    return t > 0;
}

bool segment_hits_triangle(const std::vector<double>& p, const std::vector<double>& q,
                           const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& c) {
    const double len = std::sqrt((q[0] - p[0]) * (q[0] - p[0]) + (q[1] - p[1]) * (q[1] - p[1]) +
                                 (q[2] - p[2]) * (q[2] - p[2]));
    if (len == 0) return false;
    const std::array<double, 3> dir{(q[0] - p[0]) / len, (q[1] - p[1]) / len,
                                    (q[2] - p[2]) / len};
    // reuse the ray test and cap the parameter by recomputing the hit point
    const double e1[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double e2[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const double pr[3] = {dir[1] * e2[2] - dir[2] * e2[1], dir[2] * e2[0] - dir[0] * e2[2],
                          dir[0] * e2[1] - dir[1] * e2[0]};
    const double det = e1[0] * pr[0] + e1[1] * pr[1] + e1[2] * pr[2];
    if (std::abs(det) < 1e-14) return false;
    const double inv = 1.0 / det;
    const double tv[3] = {p[0] - a[0], p[1] - a[1], p[2] - a[2]};
    const double u = (tv[0] * pr[0] + tv[1] * pr[1] + tv[2] * pr[2]) * inv;
    if (u <= 1e-12 || u >= 1 - 1e-12) return false;
    const double qv[3] = {tv[1] * e1[2] - tv[2] * e1[1], tv[2] * e1[0] - tv[0] * e1[2],
                          tv[0] * e1[1] - tv[1] * e1[0]};
    const double v = (dir[0] * qv[0] + dir[1] * qv[1] + dir[2] * qv[2]) * inv;
    if (v <= 1e-12 || u + v >= 1 - 1e-12) return false;
    const double t = (e2[0] * qv[0] + e2[1] * qv[1] + e2[2] * qv[2]) * inv;
    return t > 1e-12 * len && t < len * (1 - 1e-12);
}

void require_closed_connected(const SimplicialComplex& K) {
    const int d = K.dimension();
    IntegerMatrix B = K.boundary_matrix(d);
    for (std::size_t i = 0; i < K.count(d - 1); ++i) {
        int cof = 0;
        for (std::size_t j = 0; j < K.count(d); ++j)
            if (B(i, j) != 0) ++cof;
        if (cof != 2) throw SystemError("hypersurface is not closed (open face found)");
    }
    auto prof = homology_profile(K);
    if (prof.betti[0] != 1)
        throw SystemError("hypersurface has multiple components; one closed connected "
                          "hypersurface expected");
}

} // namespace

void SubgroupImage::add(std::string description, long degree) {
    cycles.emplace_back(std::move(description), degree);
    d = static_cast<long>(std::gcd(d, degree));
}

BoundedDomain bounded_domain(const TargetSet& A, int resolution) {
    if (A.kind != TargetKind::Hypersurface)
        throw SystemError("bounded domain requires a hypersurface target");
    const auto& K = A.shape;
    const auto& coords = K.coordinates();
    const std::size_t n = coords.begin()->second.size();
    if (K.dimension() != static_cast<int>(n) - 1)
        throw SystemError("hypersurface dimension must be n-1");
    require_closed_connected(K);

    // bounding box with margin
    std::vector<double> lo(n, 1e300), hi(n, -1e300);
    for (const auto& [id, p] : coords)
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    for (std::size_t i = 0; i < n; ++i) {
        const double m = 0.1 * (hi[i] - lo[i]) + 1e-9;
        lo[i] -= m;
        hi[i] += m;
    }

    BoundedDomain out;
    if (n == 2) {
        const auto& edges = K.simplices(1);
        // embedding: no two non-adjacent edges cross
        for (std::size_t i = 0; i < edges.size(); ++i)
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                if (edges[i][0] == edges[j][0] || edges[i][0] == edges[j][1] ||
                    edges[i][1] == edges[j][0] || edges[i][1] == edges[j][1])
                    continue;
                if (segments_cross(coords.at(edges[i][0]), coords.at(edges[i][1]),
                                   coords.at(edges[j][0]), coords.at(edges[j][1])))
                    throw SystemError("hypersurface is not embedded (edges cross)");
            }

        const double hx = (hi[0] - lo[0]) / resolution, hy = (hi[1] - lo[1]) / resolution;
        auto inside = [&](double px, double py) {
            int crossings = 0;
            for (const auto& e : edges) {
                const auto& a = coords.at(e[0]);
                const auto& b = coords.at(e[1]);
                if ((a[1] > py) == (b[1] > py)) continue;
                const double xi = a[0] + (py - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if (xi > px) ++crossings;
            }
            return crossings % 2 == 1;
        };

        std::set<std::pair<int, int>> cells;
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i)
                if (inside(lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy)) cells.insert({i, j});
        if (cells.empty()) throw SystemError("interior not resolved at this resolution");

        std::set<std::pair<int, int>> verts;
        std::set<std::tuple<int, int, int>> cedges;  // (i, j, horizontal?)
        std::vector<Simplex> tris;
        std::map<int, std::vector<double>> tri_coords;
        const int n1 = resolution + 1;
        auto vid = [&](int i, int j) {
            const int id = j * n1 + i;
            tri_coords[id] = {lo[0] + i * hx, lo[1] + j * hy};
            return id;
        };
        for (const auto& [i, j] : cells) {
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) verts.insert({i + di, j + dj});
            cedges.insert({i, j, 1});
            cedges.insert({i, j + 1, 1});
            cedges.insert({i, j, 0});
            cedges.insert({i + 1, j, 0});
            tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
        out.chi = static_cast<long long>(verts.size()) - static_cast<long long>(cedges.size()) +
                  static_cast<long long>(cells.size());
        out.region = SimplicialComplex::build(tris, tri_coords);
        return out;
    }
    if (n != 3) throw SystemError("bounded domain supports n=2 and n=3 only");

    const auto& tris = K.simplices(2);
    // embedding: no edge of a triangle pierces a non-adjacent triangle
    for (std::size_t i = 0; i < tris.size(); ++i)
        for (std::size_t j = 0; j < tris.size(); ++j) {
            if (i == j) continue;
            bool adjacent = false;
            for (int a : tris[i])
                for (int b : tris[j])
                    if (a == b) adjacent = true;
            if (adjacent) continue;
            for (int e = 0; e < 3; ++e)
                if (segment_hits_triangle(coords.at(tris[i][e]), coords.at(tris[i][(e + 1) % 3]),
                                          coords.at(tris[j][0]), coords.at(tris[j][1]),
                                          coords.at(tris[j][2])))
                    throw SystemError("hypersurface is not embedded (triangles intersect)");
        }

    const double h[3] = {(hi[0] - lo[0]) / resolution, (hi[1] - lo[1]) / resolution,
                         (hi[2] - lo[2]) / resolution};
    // mildly irrational ray direction: avoids edge-grazing degeneracies
    const std::array<double, 3> dir{1.0, 1.7320508075688772e-4, 2.2360679774997896e-4};
    auto inside = [&](const std::array<double, 3>& p) {
        int crossings = 0;
        for (const auto& t : tris)
            if (ray_hits_triangle(p, dir, coords.at(t[0]), coords.at(t[1]), coords.at(t[2])))
                ++crossings;
        return crossings % 2 == 1;
    };

    std::set<std::array<int, 3>> voxels;
    for (int k = 0; k < resolution; ++k)
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i)
                if (inside({lo[0] + (i + 0.5) * h[0], lo[1] + (j + 0.5) * h[1],
                            lo[2] + (k + 0.5) * h[2]}))
                    voxels.insert({i, j, k});
    if (voxels.empty()) throw SystemError("interior not resolved at this resolution");

    std::set<std::array<int, 3>> verts;
    std::set<std::array<int, 4>> vedges, faces;  // last entry: axis / normal axis
    for (const auto& [i, j, k] : voxels) {
        for (int dk = 0; dk <= 1; ++dk)
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) verts.insert({i + di, j + dj, k + dk});
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                vedges.insert({i, j + a, k + b, 0});
                vedges.insert({i + a, j, k + b, 1});
                vedges.insert({i + a, j + b, k, 2});
            }
        for (int d2 = 0; d2 <= 1; ++d2) {
            faces.insert({i + d2, j, k, 0});
            faces.insert({i, j + d2, k, 1});
            faces.insert({i, j, k + d2, 2});
        }
    }
    out.chi = static_cast<long long>(verts.size()) - static_cast<long long>(vedges.size()) +
              static_cast<long long>(faces.size()) - static_cast<long long>(voxels.size());

    // path-tetra decomposition of the voxel region (flag chains from the low
    // to the high corner), consistent across shared faces
    const int n1 = resolution + 1;
    std::vector<Simplex> tets;
    std::map<int, std::vector<double>> tet_coords;
    auto vid = [&](int i, int j, int k) {
        const int id = (k * n1 + j) * n1 + i;
        tet_coords[id] = {lo[0] + i * h[0], lo[1] + j * h[1], lo[2] + k * h[2]};
        return id;
    };
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& [i, j, k] : voxels)
        for (const auto& perm : perms) {
            int c[3] = {i, j, k};
            Simplex tet{vid(c[0], c[1], c[2])};
            for (int s = 0; s < 3; ++s) {
                ++c[perm[s]];
                tet.push_back(vid(c[0], c[1], c[2]));
            }
            tets.push_back(tet);
        }
    out.region = SimplicialComplex::build(tets, tet_coords);
    return out;
}

} // namespace stabcheck

#include "stabcheck/sublevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace stabcheck {

namespace {

double eval_at(const ExprPtr& e, const std::vector<double>& x) {
    std::map<std::string, double> b;
    for (std::size_t i = 0; i < x.size(); ++i) b["x" + std::to_string(i + 1)] = x[i];
    return evaluate(e, b);
}

} // namespace

LyapunovSpec LyapunovSpec::parse(const std::string& v_text, std::size_t dimension, double level,
                                 const IntervalBox& domain) {
    if (level <= 0) throw SublevelError("sublevel threshold must be positive");
    if (domain.dims.size() != dimension) throw SublevelError("domain box dimension mismatch");
    LyapunovSpec spec;
    spec.V = parse_expression(v_text, state_vars(dimension));
    spec.level = level;
    spec.domain = domain;
    // advisory sampling: V must be nonnegative where evaluated
    const int probe = 9;
    for (int k = 0; k < (dimension == 2 ? probe * probe : probe * probe * probe); ++k) {
        std::vector<double> x(dimension);
        int r = k;
        for (std::size_t i = 0; i < dimension; ++i) {
            x[i] = spec.domain.dims[i].lo +
                   spec.domain.dims[i].width() * (r % probe) / (probe - 1);
            r /= probe;
        }
        if (eval_at(spec.V, x) < 0)
            throw SublevelError("candidate function is negative inside the domain");
    }
    return spec;
}

VectorFieldSpec LyapunovSpec::gradient() const {
    std::vector<ExprPtr> parts;
    const std::size_t n = dimension();
    for (std::size_t i = 0; i < n; ++i)
        parts.push_back(derivative(V, "x" + std::to_string(i + 1)));
    return VectorFieldSpec::from_asts(std::move(parts));
}

namespace {

// gradient bounded away from zero over the box (split once before giving up)
bool gradient_regular(const VectorFieldSpec& grad, const IntervalBox& box, int depth = 1) {
    bool ub = false;
    auto enc = grad.enclosure(box, &ub);
    if (!ub) {
        double lo2 = 0;
        for (const auto& g : enc) lo2 += g.mig() * g.mig();
        if (lo2 > 0) return true;
    }
    if (depth == 0) return false;
    auto halves = box.split(box.widest_dim());
    return gradient_regular(grad, halves.first, depth - 1) &&
           gradient_regular(grad, halves.second, depth - 1);
}

// ------------------------- planar contouring -------------------------

struct Contour2 {
    std::vector<LoopCycle> loops;
    bool regular = true;
};

Contour2 marching_squares(const LyapunovSpec& spec, int res, const VectorFieldSpec& grad) {
    const double x0 = spec.domain.dims[0].lo, y0 = spec.domain.dims[1].lo;
    const double hx = spec.domain.dims[0].width() / res;
    const double hy = spec.domain.dims[1].width() / res;
    const int n1 = res + 1;

    std::vector<double> val(static_cast<std::size_t>(n1) * n1);
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) {
            double v = eval_at(spec.V, {x0 + i * hx, y0 + j * hy}) - spec.level;
            if (v == 0) v = 1e-12 * std::max(1.0, std::abs(spec.level));  // nudge outside
            val[j * n1 + i] = v;
            if (v <= 0 && (i == 0 || j == 0 || i == res || j == res))
                throw SublevelError("sublevel set reaches the domain box boundary");
        }

    // edge key: ((j*n1+i) << 1) | horizontal-bit
    auto hkey = [&](int i, int j) { return (static_cast<long>(j) * n1 + i) << 1; };
    auto vkey = [&](int i, int j) { return ((static_cast<long>(j) * n1 + i) << 1) | 1; };

    std::map<long, std::array<double, 2>> points;
    auto crossing = [&](long key, int i0, int j0, int i1, int j1) {
        auto it = points.find(key);
        if (it != points.end()) return;
        const double va = val[j0 * n1 + i0], vb = val[j1 * n1 + i1];
        const double t = va / (va - vb);
        points[key] = {x0 + (i0 + t * (i1 - i0)) * hx, y0 + (j0 + t * (j1 - j0)) * hy};
    };

    Contour2 out;
    std::vector<std::array<long, 2>> segments;
    for (int j = 0; j < res; ++j)
        for (int i = 0; i < res; ++i) {
            const double v00 = val[j * n1 + i], v10 = val[j * n1 + i + 1];
            const double v11 = val[(j + 1) * n1 + i + 1], v01 = val[(j + 1) * n1 + i];
            int mask = (v00 < 0 ? 1 : 0) | (v10 < 0 ? 2 : 0) | (v11 < 0 ? 4 : 0) |
                       (v01 < 0 ? 8 : 0);
            if (mask == 0 || mask == 15) continue;

            const long e0 = hkey(i, j), e1 = vkey(i + 1, j), e2 = hkey(i, j + 1), e3 = vkey(i, j);
            auto pt = [&](long e) {
                if (e == e0) crossing(e0, i, j, i + 1, j);
                else if (e == e1) crossing(e1, i + 1, j, i + 1, j + 1);
                else if (e == e2) crossing(e2, i, j + 1, i + 1, j + 1);
                else crossing(e3, i, j, i, j + 1);
            };
            auto add = [&](long a, long b) {
                pt(a);
                pt(b);
                segments.push_back({a, b});
            };
            switch (mask) {
            case 1: add(e3, e0); break;
            case 2: add(e0, e1); break;
            case 3: add(e3, e1); break;
            case 4: add(e1, e2); break;
            case 5: {
                const double c = eval_at(spec.V, 
                                     {x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy}) -
                                 spec.level;
                if (c < 0) { add(e0, e1); add(e2, e3); }
                else { add(e3, e0); add(e1, e2); }
                break;
            }
            case 6: add(e0, e2); break;
            case 7: add(e3, e2); break;
            case 8: add(e2, e3); break;
            case 9: add(e0, e2); break;
            case 10: {
                const double c = eval_at(spec.V, 
                                     {x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy}) -
                                 spec.level;
                if (c < 0) { add(e3, e0); add(e1, e2); }
                else { add(e0, e1); add(e2, e3); }
                break;
            }
            case 11: add(e1, e2); break;
            case 12: add(e1, e3); break;
            case 13: add(e0, e1); break;
            case 14: add(e3, e0); break;
            }

            IntervalBox cell({Interval{x0 + i * hx, x0 + (i + 1) * hx},
                              Interval{y0 + j * hy, y0 + (j + 1) * hy}});
            if (!gradient_regular(grad, cell)) out.regular = false;
        }

    // stitch segments into closed polylines
    std::map<long, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        incident[segments[s][0]].push_back(s);
        incident[segments[s][1]].push_back(s);
    }
    for (const auto& [key, segs] : incident)
        if (segs.size() != 2)
            throw SublevelError("contour stitching failed: non-manifold crossing");

    std::vector<bool> used(segments.size(), false);
    for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        LoopCycle loop;
        long at = segments[s0][0];
        std::size_t seg = s0;
        while (!used[seg]) {
            used[seg] = true;
            loop.vertices.push_back(points.at(at));
            const long next = segments[seg][0] == at ? segments[seg][1] : segments[seg][0];
            const auto& cand = incident.at(next);
            seg = (cand[0] == seg) ? cand[1] : cand[0];
            at = next;
        }
        // orient so the sublevel material lies to the left (outward normal
        // along grad V); majority vote over edges
        int votes = 0;
        const std::size_t m = loop.vertices.size();
        for (std::size_t k = 0; k < m; ++k) {
            const auto& a = loop.vertices[k];
            const auto& b = loop.vertices[(k + 1) % m];
            const double tx = b[0] - a[0], ty = b[1] - a[1];
            const double len = std::hypot(tx, ty);
            if (len == 0) continue;
            const double px = 0.5 * (a[0] + b[0]) - ty / len * 0.35 * std::min(hx, hy);
            const double py = 0.5 * (a[1] + b[1]) + tx / len * 0.35 * std::min(hx, hy);
            votes += eval_at(spec.V, {px, py}) < spec.level ? 1 : -1;
        }
        if (votes < 0) std::reverse(loop.vertices.begin(), loop.vertices.end());
        out.loops.push_back(std::move(loop));
    }
    return out;
}

// ------------------------- spatial contouring -------------------------

struct Contour3 {
    SurfaceMesh mesh;
    bool regular = true;
};

// contour of each grid cube over its six path tetrahedra (vertex chains from
// the low corner to the high corner); adjacent cubes share faces so the
// result is watertight and coherently orientable
Contour3 tetra_contour(const LyapunovSpec& spec, int res, const VectorFieldSpec& grad) {
    const double o[3] = {spec.domain.dims[0].lo, spec.domain.dims[1].lo, spec.domain.dims[2].lo};
    const double h[3] = {spec.domain.dims[0].width() / res, spec.domain.dims[1].width() / res,
                         spec.domain.dims[2].width() / res};
    const int n1 = res + 1;
    auto node = [&](int i, int j, int k) { return (static_cast<long>(k) * n1 + j) * n1 + i; };

    std::vector<double> val(static_cast<std::size_t>(n1) * n1 * n1);
    for (int k = 0; k < n1; ++k)
        for (int j = 0; j < n1; ++j)
            for (int i = 0; i < n1; ++i) {
                double v = eval_at(spec.V,
                                   {o[0] + i * h[0], o[1] + j * h[1], o[2] + k * h[2]}) -
                           spec.level;
                if (v == 0) v = 1e-12 * std::max(1.0, std::abs(spec.level));
                val[node(i, j, k)] = v;
                if (v <= 0 && (i == 0 || j == 0 || k == 0 || i == res || j == res || k == res))
                    throw SublevelError("sublevel set reaches the domain box boundary");
            }

    auto coords = [&](long id) {
        const int i = static_cast<int>(id % n1);
        const int j = static_cast<int>((id / n1) % n1);
        const int k = static_cast<int>(id / (static_cast<long>(n1) * n1));
        return std::array<double, 3>{o[0] + i * h[0], o[1] + j * h[1], o[2] + k * h[2]};
    };

    Contour3 out;
    std::map<std::pair<long, long>, int> edge_vertex;
    auto edge_point = [&](long a, long b) {
        if (a > b) std::swap(a, b);
        auto it = edge_vertex.find({a, b});
        if (it != edge_vertex.end()) return it->second;
        const double va = val[a], vb = val[b];
        const double t = va / (va - vb);
        const auto pa = coords(a), pb = coords(b);
        out.mesh.vertices.push_back({pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]),
                                     pa[2] + t * (pb[2] - pa[2])});
        const int id = static_cast<int>(out.mesh.vertices.size()) - 1;
        edge_vertex[{a, b}] = id;
        return id;
    };
    auto emit = [&](int a, int b, int c, const std::array<double, 3>& outward) {
        const auto& pa = out.mesh.vertices[a];
        const auto& pb = out.mesh.vertices[b];
        const auto& pc = out.mesh.vertices[c];
        const double ux = pb[0] - pa[0], uy = pb[1] - pa[1], uz = pb[2] - pa[2];
        const double vx = pc[0] - pa[0], vy = pc[1] - pa[1], vz = pc[2] - pa[2];
        const double nx = uy * vz - uz * vy, ny = uz * vx - ux * vz, nz = ux * vy - uy * vx;
        if (nx * outward[0] + ny * outward[1] + nz * outward[2] >= 0)
            out.mesh.triangles.push_back({a, b, c});
        else
            out.mesh.triangles.push_back({a, c, b});
    };

    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < res; ++k)
        for (int j = 0; j < res; ++j)
            for (int i = 0; i < res; ++i) {
                bool any_cross = false;
                for (const auto& perm : perms) {
                    int c[3] = {i, j, k};
                    long tet[4];
                    tet[0] = node(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++c[perm[s]];
                        tet[s + 1] = node(c[0], c[1], c[2]);
                    }
                    std::vector<int> in, outv;
                    for (int s = 0; s < 4; ++s)
                        (val[tet[s]] < 0 ? in : outv).push_back(s);
                    if (in.empty() || outv.empty()) continue;
                    any_cross = true;

                    auto centroid = [&](const std::vector<int>& vs) {
                        std::array<double, 3> c3{0, 0, 0};
                        for (int s : vs) {
                            const auto p = coords(tet[s]);
                            for (int d = 0; d < 3; ++d) c3[d] += p[d] / vs.size();
                        }
                        return c3;
                    };
                    const auto ci = centroid(in), co = centroid(outv);
                    const std::array<double, 3> dir{co[0] - ci[0], co[1] - ci[1], co[2] - ci[2]};

                    if (in.size() == 1 || in.size() == 3) {
                        const int apex = in.size() == 1 ? in[0] : outv[0];
                        const auto& ring = in.size() == 1 ? outv : in;
                        const int p0 = edge_point(tet[apex], tet[ring[0]]);
                        const int p1 = edge_point(tet[apex], tet[ring[1]]);
                        const int p2 = edge_point(tet[apex], tet[ring[2]]);
                        emit(p0, p1, p2, dir);
                    } else {
                        // two inside / two outside: a quad, split into two
                        const int a = in[0], b = in[1], cc = outv[0], d = outv[1];
                        const int q0 = edge_point(tet[a], tet[cc]);
                        const int q1 = edge_point(tet[a], tet[d]);
                        const int q2 = edge_point(tet[b], tet[d]);
                        const int q3 = edge_point(tet[b], tet[cc]);
                        emit(q0, q1, q2, dir);
                        emit(q0, q2, q3, dir);
                    }
                }
                if (any_cross) {
                    IntervalBox cell({Interval{o[0] + i * h[0], o[0] + (i + 1) * h[0]},
                                      Interval{o[1] + j * h[1], o[1] + (j + 1) * h[1]},
                                      Interval{o[2] + k * h[2], o[2] + (k + 1) * h[2]}});
                    if (!gradient_regular(grad, cell)) out.regular = false;
                }
            }
    return out;
}

} // namespace

SublevelBoundary extract_sublevel_boundary(const LyapunovSpec& spec, int resolution) {
    const std::size_t n = spec.dimension();
    if (n != 2 && n != 3) throw SublevelError("contour extraction supports n=2 and n=3 only");
    if (resolution < 4) throw SublevelError("resolution too small");

    SublevelBoundary b;
    b.dimension = n;
    b.resolution = resolution;
    b.cell_size = spec.domain.max_width() / resolution;
    const auto grad = spec.gradient();
    if (n == 2) {
        auto c = marching_squares(spec, resolution, grad);
        if (c.loops.empty()) throw SublevelError("level set not found inside the domain box");
        b.loops = std::move(c.loops);
        b.regular_value_certified = c.regular;
    } else {
        auto c = tetra_contour(spec, resolution, grad);
        if (c.mesh.triangles.empty())
            throw SublevelError("level set not found inside the domain box");
        b.mesh = std::move(c.mesh);
        b.regular_value_certified = c.regular;
    }
    return b;
}

namespace {

ExprPtr decrease_expression(const LyapunovSpec& spec, const VectorFieldSpec& G) {
    const auto grad = spec.gradient();
    ExprPtr dot = Expr::constant(0.0);
    for (std::size_t i = 0; i < spec.dimension(); ++i)
        dot = Expr::binary(BinaryOp::Add, dot,
                           Expr::binary(BinaryOp::Mul, grad.components[i], G.components[i]));
    return dot;
}

struct DecreaseScan {
    const ExprPtr& V;
    const ExprPtr& W;
    double eps, level;
    DecreaseReport report;

    void certify(const IntervalBox& box, int depth) {
        auto vres = interval_evaluate(V, box, state_vars(box.dims.size()));
        if (!vres.unbounded && (vres.value.hi < eps || vres.value.lo > level)) return;
        auto wres = interval_evaluate(W, box, state_vars(box.dims.size()));
        if (!wres.unbounded && wres.value.hi < 0) {
            report.worst_upper = std::max(report.worst_upper, wres.value.hi);
            return;
        }
        if (depth <= 0) {
            report.inconclusive.push_back(box);
            return;
        }
        auto halves = box.split(box.widest_dim());
        certify(halves.first, depth - 1);
        certify(halves.second, depth - 1);
    }
};

} // namespace

DecreaseReport verify_lyapunov(const LyapunovSpec& spec, const VectorFieldSpec& G, double eps,
                               int resolution, int depth_cap) {
    if (G.dimension != spec.dimension())
        throw SublevelError("vector field dimension does not match the domain");
    if (eps < 0) eps = spec.level / 100.0;
    const ExprPtr W = decrease_expression(spec, G);

    DecreaseScan scan{spec.V, W, eps, spec.level, {}};
    scan.report.worst_upper = -std::numeric_limits<double>::infinity();

    const std::size_t n = spec.dimension();
    std::vector<int> idx(n, 0);
    while (true) {
        std::vector<Interval> dims(n);
        for (std::size_t d = 0; d < n; ++d) {
            const double w = spec.domain.dims[d].width() / resolution;
            dims[d] = Interval{spec.domain.dims[d].lo + idx[d] * w,
                               spec.domain.dims[d].lo + (idx[d] + 1) * w};
        }
        scan.certify(IntervalBox(dims), depth_cap);
        std::size_t d = 0;
        while (d < n && ++idx[d] == resolution) idx[d++] = 0;
        if (d == n) break;
    }
    scan.report.certified = scan.report.inconclusive.empty();
    if (!std::isfinite(scan.report.worst_upper)) scan.report.worst_upper = 0.0;
    return scan.report;
}

DecreaseReport inward_decrease(const LyapunovSpec& spec, const VectorFieldSpec& G,
                               const SublevelBoundary& boundary, int depth_cap) {
    const ExprPtr W = decrease_expression(spec, G);
    const double r = boundary.cell_size;

    DecreaseReport report;
    report.worst_upper = -std::numeric_limits<double>::infinity();
    auto check = [&](const std::vector<double>& p) {
        std::vector<Interval> dims;
        for (double c : p) dims.push_back(Interval{c - r, c + r});
        // tube box: no sublevel filter, the whole box must decrease
        DecreaseScan scan{spec.V, W, -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), {}};
        scan.report.worst_upper = report.worst_upper;
        scan.certify(IntervalBox(dims), depth_cap);
        report.worst_upper = std::max(report.worst_upper, scan.report.worst_upper);
        for (auto& b : scan.report.inconclusive) report.inconclusive.push_back(b);
    };

    if (boundary.dimension == 2) {
        for (const auto& loop : boundary.loops)
            for (const auto& v : loop.vertices) check({v[0], v[1]});
    } else {
        for (const auto& v : boundary.mesh.vertices) check({v[0], v[1], v[2]});
    }
    report.certified = report.inconclusive.empty();
    if (!std::isfinite(report.worst_upper)) report.worst_upper = 0.0;
    return report;
}

bool inward_check(const VectorFieldSpec& G, const SublevelBoundary& boundary,
                  const LyapunovSpec& spec) {
    return inward_decrease(spec, G, boundary).certified;
}

SimplicialComplex filled_region_complex(const LyapunovSpec& spec, int resolution) {
    if (spec.dimension() != 2)
        throw SublevelError("filled region triangulation supports n=2 only");
    const double x0 = spec.domain.dims[0].lo, y0 = spec.domain.dims[1].lo;
    const double hx = spec.domain.dims[0].width() / resolution;
    const double hy = spec.domain.dims[1].width() / resolution;
    const int n1 = resolution + 1;

    std::vector<bool> inside(static_cast<std::size_t>(n1) * n1);
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i)
            inside[j * n1 + i] =
                eval_at(spec.V, {x0 + i * hx, y0 + j * hy}) < spec.level;

    std::vector<Simplex> tris;
    std::map<int, std::vector<double>> coords;
    auto use = [&](int i, int j) {
        const int id = j * n1 + i;
        coords[id] = {x0 + i * hx, y0 + j * hy};
        return id;
    };
    for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i) {
            if (!(inside[j * n1 + i] && inside[j * n1 + i + 1] && inside[(j + 1) * n1 + i] &&
                  inside[(j + 1) * n1 + i + 1]))
                continue;
            const int a = use(i, j), b = use(i + 1, j), c = use(i + 1, j + 1), d = use(i, j + 1);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }
    if (tris.empty()) throw SublevelError("no grid cell lies fully inside the sublevel set");
    return SimplicialComplex::build(tris, coords);
}

SimplicialComplex boundary_complex(const SublevelBoundary& boundary) {
    std::vector<Simplex> top;
    std::map<int, std::vector<double>> coords;
    if (boundary.dimension == 2) {
        int base = 0;
        for (const auto& loop : boundary.loops) {
            const int m = static_cast<int>(loop.vertices.size());
            for (int k = 0; k < m; ++k) {
                coords[base + k] = {loop.vertices[k][0], loop.vertices[k][1]};
                top.push_back({base + k, base + (k + 1) % m});
            }
            base += m;
        }
    } else {
        for (std::size_t v = 0; v < boundary.mesh.vertices.size(); ++v)
            coords[static_cast<int>(v)] = {boundary.mesh.vertices[v][0],
                                           boundary.mesh.vertices[v][1],
                                           boundary.mesh.vertices[v][2]};
        for (const auto& t : boundary.mesh.triangles) top.push_back({t[0], t[1], t[2]});
    }
    return SimplicialComplex::build(top, coords);
}

} // namespace stabcheck

#include "stabcheck/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "stabcheck/simplicial.hpp"

namespace stabcheck {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroTol = 1e-12;

std::map<std::string, double> state_bindings(const std::vector<double>& x) {
    std::map<std::string, double> b;
    for (std::size_t i = 0; i < x.size(); ++i) b["x" + std::to_string(i + 1)] = x[i];
    return b;
}

double angle_between(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    // signed angle from a to b, in (-pi, pi]
    const double cross = a[0] * b[1] - a[1] * b[0];
    const double dot = a[0] * b[0] + a[1] * b[1];
    return std::atan2(cross, dot);
}

double norm2(const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); }
double norm3(const std::array<double, 3>& v) { return std::sqrt(v[0]*v[0]+v[1]*v[1]+v[2]*v[2]); }

} // namespace

VectorFieldSpec VectorFieldSpec::parse(std::size_t n, const std::vector<std::string>& texts) {
    if (texts.size() != n)
        throw DegreeError("VectorFieldSpec: expected " + std::to_string(n) + " components");
    VectorFieldSpec f;
    f.dimension = n;
    const auto vars = state_vars(n);
    for (const auto& t : texts) f.components.push_back(parse_expression(t, vars));
    return f;
}

VectorFieldSpec VectorFieldSpec::from_asts(std::vector<ExprPtr> comps) {
    VectorFieldSpec f;
    f.dimension = comps.size();
    f.components = std::move(comps);
    return f;
}

std::vector<double> VectorFieldSpec::eval(const std::vector<double>& x) const {
    const auto b = state_bindings(x);
    std::vector<double> out(dimension);
    for (std::size_t i = 0; i < dimension; ++i) out[i] = evaluate(components[i], b);
    return out;
}

double VectorFieldSpec::norm_at(const std::vector<double>& x) const {
    const auto v = eval(x);
    double s = 0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

std::vector<Interval> VectorFieldSpec::enclosure(const IntervalBox& box, bool* unbounded) const {
    const auto vars = state_vars(box.size());
    std::vector<Interval> out;
    bool ub = false;
    for (const auto& c : components) {
        auto r = interval_evaluate(c, box, vars);
        ub = ub || r.unbounded;
        out.push_back(r.value);
    }
    if (unbounded) *unbounded = ub;
    return out;
}

double VectorFieldSpec::lipschitz(const IntervalBox& box, bool* heuristic) const {
    const auto vars = state_vars(box.size());
    double sq = 0;
    bool heur = false;
    for (const auto& c : components) {
        auto rl = range_and_lipschitz(c, box, vars);
        if (rl.unbounded) {
            if (heuristic) *heuristic = true;
            return std::numeric_limits<double>::infinity();
        }
        heur = heur || rl.heuristic;
        sq += rl.lipschitz * rl.lipschitz;
    }
    if (heuristic) *heuristic = heur;
    return std::sqrt(sq);
}

LoopCycle make_circle_loop(std::array<double, 2> center, double radius, std::size_t segments) {
    LoopCycle loop;
    for (std::size_t k = 0; k < segments; ++k) {
        const double t = 2.0 * kPi * double(k) / double(segments);
        loop.vertices.push_back({center[0] + radius * std::cos(t),
                                 center[1] + radius * std::sin(t)});
    }
    return loop;
}

LoopCycle reversed(const LoopCycle& loop) {
    LoopCycle r = loop;
    std::reverse(r.vertices.begin(), r.vertices.end());
    return r;
}

SurfaceMesh make_icosphere(std::array<double, 3> center, double radius, int level) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<int, 3>> t = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    SurfaceMesh mesh;
    mesh.vertices = v;
    mesh.triangles = t;
    for (int l = 0; l < level; ++l) mesh = refined(mesh);
    for (auto& p : mesh.vertices) {
        const double n = norm3(p);
        for (int d = 0; d < 3; ++d) p[d] = center[d] + radius * p[d] / n;
    }
    return mesh;
}

SurfaceMesh make_box_surface(const IntervalBox& box) {
    const double x0 = box[0].lo, x1 = box[0].hi, y0 = box[1].lo, y1 = box[1].hi,
                 z0 = box[2].lo, z1 = box[2].hi;
    SurfaceMesh m;
    m.vertices = {{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0},
                  {x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1}};
    m.triangles = {{0, 2, 1}, {0, 3, 2},   // bottom (z = z0), outward = -z
                   {4, 5, 6}, {4, 6, 7},   // top, outward = +z
                   {0, 1, 5}, {0, 5, 4},   // y = y0, outward = -y
                   {2, 3, 7}, {2, 7, 6},   // y = y1, outward = +y
                   {0, 4, 7}, {0, 7, 3},   // x = x0, outward = -x
                   {1, 2, 6}, {1, 6, 5}};  // x = x1, outward = +x
    return m;
}

SurfaceMesh refined(const SurfaceMesh& mesh) {
    SurfaceMesh out;
    out.vertices = mesh.vertices;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const auto& pa = mesh.vertices[a];
        const auto& pb = mesh.vertices[b];
        out.vertices.push_back({(pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2, (pa[2] + pb[2]) / 2});
        const int id = int(out.vertices.size()) - 1;
        midpoint.emplace(key, id);
        return id;
    };
    for (const auto& t : mesh.triangles) {
        const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({t[1], bc, ab});
        out.triangles.push_back({t[2], ca, bc});
        out.triangles.push_back({ab, bc, ca});
    }
    return out;
}

namespace {

IntervalBox loop_bounding_box(const LoopCycle& loop) {
    Interval x{loop.vertices[0][0], loop.vertices[0][0]};
    Interval y{loop.vertices[0][1], loop.vertices[0][1]};
    for (const auto& p : loop.vertices) {
        x = hull(x, Interval{p[0]});
        y = hull(y, Interval{p[1]});
    }
    return IntervalBox({x, y});
}

} // namespace

DegreeResult winding_number(const VectorFieldSpec& field, const LoopCycle& loop, int depth_cap) {
    if (field.dimension != 2) throw DegreeError("winding_number: field dimension must be 2");
    if (loop.vertices.size() < 3) throw DegreeError("winding_number: degenerate loop");

    std::vector<std::array<double, 2>> pts = loop.vertices;
    bool heuristic_lip = false;
    const double L_global = field.lipschitz(loop_bounding_box(loop), &heuristic_lip);
    const bool have_lip = std::isfinite(L_global);

    // midpoint-refine segments until the no-wraparound bound holds
    for (int depth = 0; have_lip && depth < depth_cap; ++depth) {
        std::vector<std::array<double, 2>> next;
        bool all_ok = true;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const auto& p = pts[k];
            const auto& q = pts[(k + 1) % pts.size()];
            next.push_back(p);
            const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
            const double m = std::min(field.norm_at({p[0], p[1]}), field.norm_at({q[0], q[1]}));
            if (L_global * len >= m && len > 1e-14) {
                all_ok = false;
                next.push_back({(p[0] + q[0]) / 2, (p[1] + q[1]) / 2});
            }
        }
        pts = std::move(next);
        if (all_ok) break;
    }

    double total = 0.0;
    double min_norm = std::numeric_limits<double>::infinity();
    bool certified = have_lip && !heuristic_lip;
    std::vector<std::array<double, 2>> vals(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const auto v = field.eval({pts[k][0], pts[k][1]});
        vals[k] = {v[0], v[1]};
        const double n = norm2(vals[k]);
        if (n < kZeroTol)
            throw DegreeError("winding_number: field vanishes on the loop near (" +
                              std::to_string(pts[k][0]) + ", " + std::to_string(pts[k][1]) + ")");
        min_norm = std::min(min_norm, n);
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const auto& p = pts[k];
        const auto& q = pts[(k + 1) % pts.size()];
        const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
        const double m = std::min(norm2(vals[k]), norm2(vals[(k + 1) % pts.size()]));
        if (!have_lip || L_global * len >= m) certified = false;
        total += angle_between(vals[k], vals[(k + 1) % pts.size()]);
    }

    DegreeResult r;
    r.degree = std::lround(total / (2.0 * kPi));
    r.status = certified ? CertStatus::Certified : CertStatus::Heuristic;
    r.min_norm = min_norm;
    r.resolution = pts.size();
    return r;
}

DegreeResult winding_number_param(const ExprPtr& x_of_t, const ExprPtr& y_of_t,
                                  std::size_t initial_segments, int depth_cap) {
    const std::vector<std::string> tv = {"t"};
    std::vector<double> ts(initial_segments);
    for (std::size_t k = 0; k < initial_segments; ++k)
        ts[k] = double(k) / double(initial_segments);

    auto value_at = [&](double t) -> std::array<double, 2> {
        std::map<std::string, double> b{{"t", t}};
        return {evaluate(x_of_t, b), evaluate(y_of_t, b)};
    };

    for (int depth = 0; depth < depth_cap; ++depth) {
        std::vector<double> next;
        bool all_ok = true;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double a = ts[k];
            const double b = (k + 1 < ts.size()) ? ts[k + 1] : 1.0;
            next.push_back(a);
            IntervalBox seg({Interval{a, b}});
            auto rx = range_and_lipschitz(x_of_t, seg, tv);
            auto ry = range_and_lipschitz(y_of_t, seg, tv);
            const double L = std::hypot(rx.lipschitz, ry.lipschitz);
            const double m = std::min(norm2(value_at(a)), norm2(value_at(b)));
            const bool usable = !rx.unbounded && !ry.unbounded;
            if (!usable || L * (b - a) >= m) {
                all_ok = false;
                next.push_back((a + b) / 2);
            }
        }
        ts = std::move(next);
        if (all_ok) break;
    }

    double total = 0.0;
    double min_norm = std::numeric_limits<double>::infinity();
    bool certified = true;
    std::vector<std::array<double, 2>> vals(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        vals[k] = value_at(ts[k]);
        const double n = norm2(vals[k]);
        if (n < kZeroTol)
            throw DegreeError("winding_number_param: map vanishes at t=" + std::to_string(ts[k]));
        min_norm = std::min(min_norm, n);
    }
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double a = ts[k];
        const double b = (k + 1 < ts.size()) ? ts[k + 1] : 1.0;
        IntervalBox seg({Interval{a, b}});
        auto rx = range_and_lipschitz(x_of_t, seg, tv);
        auto ry = range_and_lipschitz(y_of_t, seg, tv);
        const double L = std::hypot(rx.lipschitz, ry.lipschitz);
        const double m = std::min(norm2(vals[k]), norm2(vals[(k + 1) % ts.size()]));
        if (rx.unbounded || ry.unbounded || rx.heuristic || ry.heuristic || L * (b - a) >= m)
            certified = false;
        total += angle_between(vals[k], vals[(k + 1) % ts.size()]);
    }

    DegreeResult r;
    r.degree = std::lround(total / (2.0 * kPi));
    r.status = certified ? CertStatus::Certified : CertStatus::Heuristic;
    r.min_norm = min_norm;
    r.resolution = ts.size();
    return r;
}

DegreeResult winding_from_samples(const std::vector<std::array<double, 2>>& values) {
    if (values.size() < 3) throw DegreeError("winding_from_samples: need at least 3 samples");
    double total = 0.0;
    double min_norm = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double n = norm2(values[k]);
        if (n < kZeroTol) throw DegreeError("winding_from_samples: zero sample");
        min_norm = std::min(min_norm, n);
        total += angle_between(values[k], values[(k + 1) % values.size()]);
    }
    DegreeResult r;
    r.degree = std::lround(total / (2.0 * kPi));
    r.status = CertStatus::Heuristic;
    r.min_norm = min_norm;
    r.resolution = values.size();
    return r;
}

namespace {

IntervalBox triangle_box(const SurfaceMesh& mesh, const std::array<int, 3>& t) {
    std::vector<Interval> dims(3);
    for (int d = 0; d < 3; ++d) {
        double lo = 1e300, hi = -1e300;
        for (int vi : t) {
            lo = std::min(lo, mesh.vertices[vi][d]);
            hi = std::max(hi, mesh.vertices[vi][d]);
        }
        dims[d] = Interval{lo, hi};
    }
    return IntervalBox(dims);
}

// signed solid angle of the spherical triangle spanned by unit vectors
double signed_solid_angle(const std::array<double, 3>& a, const std::array<double, 3>& b,
                          const std::array<double, 3>& c) {
    const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                       a[2] * (b[0] * c[1] - b[1] * c[0]);
    const double dab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    const double dbc = b[0] * c[0] + b[1] * c[1] + b[2] * c[2];
    const double dca = c[0] * a[0] + c[1] * a[1] + c[2] * a[2];
    return 2.0 * std::atan2(det, 1.0 + dab + dbc + dca);
}

} // namespace

DegreeResult mapping_degree(const VectorFieldSpec& field, const SurfaceMesh& sphere,
                            int depth_cap) {
    if (field.dimension != 3) throw DegreeError("mapping_degree: field dimension must be 3");

    SurfaceMesh mesh = sphere;
    bool certified = true;

    // refine globally until each triangle's image is guaranteed inside an
    // open hemisphere (variation below min vertex norm), or give up
    for (int depth = 0; depth < depth_cap; ++depth) {
        bool all_ok = true;
        for (const auto& t : mesh.triangles) {
            bool heur = false;
            const IntervalBox tb = triangle_box(mesh, t);
            const double L = field.lipschitz(tb, &heur);
            double m = std::numeric_limits<double>::infinity();
            for (int vi : t) {
                const auto& p = mesh.vertices[vi];
                m = std::min(m, field.norm_at({p[0], p[1], p[2]}));
            }
            if (!std::isfinite(L) || heur) {
                all_ok = true;  // cannot certify at any depth; fall to heuristic
                certified = false;
                break;
            }
            if (L * tb.diameter() >= m) {
                all_ok = false;
                break;
            }
        }
        if (all_ok) break;
        if (depth + 1 == depth_cap || mesh.triangles.size() > 250000) {
            certified = false;
            break;
        }
        mesh = refined(mesh);
    }

    std::vector<std::array<double, 3>> dir(mesh.vertices.size());
    double min_norm = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& p = mesh.vertices[i];
        const auto v = field.eval({p[0], p[1], p[2]});
        const double n = norm3({v[0], v[1], v[2]});
        if (n < kZeroTol)
            throw DegreeError("mapping_degree: field vanishes on the mesh near (" +
                              std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
                              std::to_string(p[2]) + ")");
        min_norm = std::min(min_norm, n);
        dir[i] = {v[0] / n, v[1] / n, v[2] / n};
    }

    double total = 0.0;
    for (const auto& t : mesh.triangles) {
        const double omega = signed_solid_angle(dir[t[0]], dir[t[1]], dir[t[2]]);
        total += omega;
    }

    DegreeResult r;
    r.degree = std::lround(total / (4.0 * kPi));
    r.status = certified ? CertStatus::Certified : CertStatus::Heuristic;
    r.min_norm = min_norm;
    r.resolution = mesh.triangles.size();
    return r;
}

namespace {

// ---- Krawczyk contraction for square systems, n <= 3 ----

bool invert_small(const std::vector<std::vector<double>>& A, std::vector<std::vector<double>>& inv) {
    const std::size_t n = A.size();
    std::vector<std::vector<double>> m = A;
    inv.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        if (std::abs(m[p][c]) < 1e-14) return false;
        std::swap(m[p], m[c]);
        std::swap(inv[p], inv[c]);
        const double piv = m[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            m[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = m[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                m[r][j] -= f * m[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return true;
}

} // namespace

// Krawczyk: K = y - Y f(y) + (I - Y J(X)) (X - y); unique zero iff K strictly
// inside X.
bool krawczyk_unique_zero(const VectorFieldSpec& field, const IntervalBox& X) {
    const std::size_t n = field.dimension;
    const auto vars = state_vars(n);
    const auto y = X.midpoint();

    std::vector<std::vector<Interval>> J(n, std::vector<Interval>(n));
    std::vector<std::vector<double>> Jmid(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto d = derivative(field.components[i], vars[j]);
            auto r = interval_evaluate(d, X, vars);
            if (r.unbounded || r.heuristic) return false;
            J[i][j] = r.value;
            Jmid[i][j] = r.value.mid();
        }
    std::vector<std::vector<double>> Y;
    if (!invert_small(Jmid, Y)) return false;

    const auto fy = field.eval(y);
    std::vector<Interval> K(n);
    for (std::size_t i = 0; i < n; ++i) {
        Interval acc{y[i], y[i]};
        // - Y f(y)
        double shift = 0;
        for (std::size_t j = 0; j < n; ++j) shift += Y[i][j] * fy[j];
        acc = acc - Interval{shift, shift};
        // (I - Y J) (X - y)
        for (std::size_t j = 0; j < n; ++j) {
            Interval coef = (i == j) ? Interval{1.0, 1.0} : Interval{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k)
                coef = coef - Interval{Y[i][k], Y[i][k]} * J[k][j];
            acc = acc + coef * Interval{X[j].lo - y[j], X[j].hi - y[j]};
        }
        K[i] = acc;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!K[i].strictly_inside(X[i])) return false;
    return true;
}

namespace {

// boundary degree of the field around a 2-D or 3-D box
std::optional<long> boundary_degree(const VectorFieldSpec& field, const IntervalBox& box) {
    try {
        if (field.dimension == 2) {
            LoopCycle rect;
            const double x0 = box[0].lo, x1 = box[0].hi, y0 = box[1].lo, y1 = box[1].hi;
            // counterclockwise rectangle, a few points per side
            const int s = 8;
            for (int k = 0; k < s; ++k)
                rect.vertices.push_back({x0 + (x1 - x0) * k / s, y0});
            for (int k = 0; k < s; ++k)
                rect.vertices.push_back({x1, y0 + (y1 - y0) * k / s});
            for (int k = 0; k < s; ++k)
                rect.vertices.push_back({x1 - (x1 - x0) * k / s, y1});
            for (int k = 0; k < s; ++k)
                rect.vertices.push_back({x0, y1 - (y1 - y0) * k / s});
            auto r = winding_number(field, rect);
            if (r.status != CertStatus::Certified) return std::nullopt;
            return r.degree;
        }
        if (field.dimension == 3) {
            auto r = mapping_degree(field, make_box_surface(box));
            if (r.status != CertStatus::Certified) return std::nullopt;
            return r.degree;
        }
    } catch (const DegreeError&) {
        return std::nullopt;
    }
    return std::nullopt;
}

struct Cell {
    IntervalBox box;
    int depth;
};

bool boxes_touch(const IntervalBox& a, const IntervalBox& b) {
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double gap = std::max(a[d].lo, b[d].lo) - std::min(a[d].hi, b[d].hi);
        if (gap > 1e-12) return false;
    }
    return true;
}

IntervalBox box_hull(const IntervalBox& a, const IntervalBox& b) {
    IntervalBox h = a;
    for (std::size_t d = 0; d < a.size(); ++d) h[d] = hull(a[d], b[d]);
    return h;
}

} // namespace

std::vector<ZeroCertificate> locate_zeros(const VectorFieldSpec& field, const IntervalBox& box,
                                          int resolution, int depth_cap) {
    if (resolution < 2) throw DegreeError("locate_zeros: resolution must be >= 2 per axis");
    const std::size_t n = field.dimension;
    if (box.size() != n) throw DegreeError("locate_zeros: box dimension mismatch");
    const auto vars = state_vars(n);

    // initial grid
    std::deque<Cell> work;
    std::vector<int> idx(n, 0);
    for (;;) {
        std::vector<Interval> dims(n);
        for (std::size_t d = 0; d < n; ++d) {
            const double w = box[d].width() / resolution;
            dims[d] = Interval{box[d].lo + idx[d] * w, box[d].lo + (idx[d] + 1) * w};
        }
        work.push_back({IntervalBox(dims), 0});
        std::size_t d = 0;
        while (d < n && ++idx[d] == resolution) idx[d++] = 0;
        if (d == n) break;
    }

    auto excludes_zero = [&](const IntervalBox& cell) {
        for (const auto& c : field.components) {
            auto r = interval_evaluate(c, cell, vars);
            if (!r.unbounded && !r.value.contains_zero()) return true;
        }
        return false;
    };

    std::vector<IntervalBox> survivors;
    while (!work.empty()) {
        Cell c = work.front();
        work.pop_front();
        if (excludes_zero(c.box)) continue;
        if (c.depth < depth_cap) {
            auto [a, b] = c.box.split(c.box.widest_dim());
            work.push_back({a, c.depth + 1});
            work.push_back({b, c.depth + 1});
        } else {
            survivors.push_back(c.box);
        }
    }

    // merge face-adjacent survivors into clusters
    std::vector<int> cluster(survivors.size(), -1);
    int nclusters = 0;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        if (cluster[i] != -1) continue;
        cluster[i] = nclusters;
        std::deque<std::size_t> bfs{i};
        while (!bfs.empty()) {
            std::size_t s = bfs.front();
            bfs.pop_front();
            for (std::size_t j = 0; j < survivors.size(); ++j)
                if (cluster[j] == -1 && boxes_touch(survivors[s], survivors[j])) {
                    cluster[j] = nclusters;
                    bfs.push_back(j);
                }
        }
        ++nclusters;
    }

    std::vector<ZeroCertificate> out;
    for (int c = 0; c < nclusters; ++c) {
        IntervalBox enclosing;
        bool first = true;
        for (std::size_t i = 0; i < survivors.size(); ++i)
            if (cluster[i] == c) {
                enclosing = first ? survivors[i] : box_hull(enclosing, survivors[i]);
                first = false;
            }
        // inflate a touch so the boundary cycle clears the zero set
        IntervalBox test = enclosing;
        for (std::size_t d = 0; d < n; ++d) {
            const double pad = 0.25 * std::max(test[d].width(), 1e-6);
            test[d].lo = std::max(box[d].lo, test[d].lo - pad);
            test[d].hi = std::min(box[d].hi, test[d].hi + pad);
        }
        ZeroCertificate z;
        z.box = test;
        auto deg = boundary_degree(field, test);
        const bool contracted = krawczyk_unique_zero(field, test);
        if (deg && (*deg == 1 || *deg == -1) && contracted) {
            z.certified = true;
            z.index = *deg;
        } else {
            z.certified = false;
            z.note = !deg ? "boundary degree not certified"
                          : (contracted ? "boundary degree not +-1"
                                        : "interval Newton contraction failed");
        }
        out.push_back(std::move(z));
    }
    return out;
}

long field_index(const VectorFieldSpec& field, const ZeroCertificate& zero,
                 const std::vector<ZeroCertificate>& all_zeros) {
    // for an uncertified cluster this is the total index of the zeros inside
    const auto center = zero.box.midpoint();
    double radius = 0.75 * zero.box.diameter();
    for (const auto& other : all_zeros) {
        if (&other == &zero) continue;
        const auto oc = other.box.midpoint();
        double d2 = 0;
        for (std::size_t i = 0; i < center.size(); ++i)
            d2 += (center[i] - oc[i]) * (center[i] - oc[i]);
        const double sep = std::sqrt(d2) - 0.75 * other.box.diameter();
        if (sep > 0) radius = std::min(radius, 0.9 * sep);
    }

    if (field.dimension == 2) {
        auto r = winding_number(field, make_circle_loop({center[0], center[1]}, radius, 64));
        return r.degree;
    }
    if (field.dimension == 3) {
        auto r = mapping_degree(field, make_icosphere({center[0], center[1], center[2]}, radius, 2));
        return r.degree;
    }
    throw DegreeError("field_index: dimension must be 2 or 3");
}

namespace {

bool point_in_triangle(double px, double py, const std::vector<double>& a,
                       const std::vector<double>& b, const std::vector<double>& c) {
    auto sign = [](double x1, double y1, double x2, double y2, double x3, double y3) {
        return (x1 - x3) * (y2 - y3) - (x2 - x3) * (y1 - y3);
    };
    const double d1 = sign(px, py, a[0], a[1], b[0], b[1]);
    const double d2 = sign(px, py, b[0], b[1], c[0], c[1]);
    const double d3 = sign(px, py, c[0], c[1], a[0], a[1]);
    const bool neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    const bool pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(neg && pos);
}

bool point_in_region(double px, double py, const SimplicialComplex& region) {
    const auto& coords = region.coordinates();
    for (const auto& t : region.simplices(2)) {
        if (point_in_triangle(px, py, coords.at(t[0]), coords.at(t[1]), coords.at(t[2])))
            return true;
    }
    return false;
}

} // namespace

PoincareHopfAudit poincare_hopf_audit(const VectorFieldSpec& field,
                                      const SimplicialComplex& region,
                                      const IntervalBox& domain_box, int resolution) {
    PoincareHopfAudit audit;
    if (field.dimension != 2 || region.dimension() != 2) {
        audit.notes.push_back("audit supports planar (n=2) regions only");
        return audit;
    }
    const auto& coords = region.coordinates();
    const auto vars = state_vars(2);

    // boundary edges: exactly one triangle coface; outward normal away from
    // the opposite vertex
    IntegerMatrix B = region.boundary_matrix(2);
    for (std::size_t e = 0; e < region.count(1); ++e) {
        std::vector<std::size_t> cof;
        for (std::size_t t = 0; t < region.count(2); ++t)
            if (B(e, t) != 0) cof.push_back(t);
        if (cof.size() != 1) continue;
        const auto& edge = region.simplices(1)[e];
        const auto& tri = region.simplices(2)[cof[0]];
        int opp = -1;
        for (int v : tri)
            if (v != edge[0] && v != edge[1]) opp = v;
        const auto& pa = coords.at(edge[0]);
        const auto& pb = coords.at(edge[1]);
        const auto& pc = coords.at(opp);
        double nx = pb[1] - pa[1], ny = pa[0] - pb[0];
        // point away from the interior vertex
        if (nx * (pc[0] - pa[0]) + ny * (pc[1] - pa[1]) > 0) {
            nx = -nx;
            ny = -ny;
        }
        const double nn = std::hypot(nx, ny);
        nx /= nn;
        ny /= nn;
        // certify field . n_out < 0 along the edge, bisecting as needed
        const std::function<bool(double, double, int)> inward = [&](double s0, double s1,
                                                                    int depth) {
            const double ax = pa[0] + s0 * (pb[0] - pa[0]), ay = pa[1] + s0 * (pb[1] - pa[1]);
            const double bx = pa[0] + s1 * (pb[0] - pa[0]), by = pa[1] + s1 * (pb[1] - pa[1]);
            IntervalBox ebox({Interval{std::min(ax, bx), std::max(ax, bx)},
                              Interval{std::min(ay, by), std::max(ay, by)}});
            bool ub = false;
            auto enc = field.enclosure(ebox, &ub);
            const Interval dot = enc[0] * Interval{nx, nx} + enc[1] * Interval{ny, ny};
            if (!ub && dot.hi < 0) return true;
            if (depth >= 10) return false;
            const double sm = 0.5 * (s0 + s1);
            return inward(s0, sm, depth + 1) && inward(sm, s1, depth + 1);
        };
        if (!inward(0.0, 1.0, 0)) {
            audit.notes.push_back("boundary edge not certified inward-pointing");
            return audit;
        }
    }

    auto zeros = locate_zeros(field, domain_box, resolution);
    long sum = 0;
    for (const auto& z : zeros) {
        const auto c = z.box.midpoint();
        if (!point_in_region(c[0], c[1], region)) continue;
        if (!z.certified) {
            audit.notes.push_back("uncertified zero cluster inside the region");
            return audit;  // inconclusive, never pass
        }
        sum += field_index(field, z, zeros);
    }

    audit.chi = homology_profile(region).euler;
    audit.index_sum = sum;
    audit.conclusive = true;
    audit.pass = (audit.chi == sum);
    return audit;
}

HomotopyCertificate homotopy_nonvanishing(const VectorFieldSpec& F, const VectorFieldSpec& G,
                                          const std::vector<IntervalBox>& cells, int depth_cap) {
    HomotopyCertificate cert;
    cert.certified = true;

    auto half_space_ok = [&](const IntervalBox& cell) {
        bool ubF = false, ubG = false;
        const auto encF = F.enclosure(cell, &ubF);
        const auto encG = G.enclosure(cell, &ubG);
        if (ubF || ubG) return false;
        const std::size_t n = encF.size();
        // candidate separating directions
        std::vector<std::vector<double>> candidates;
        std::vector<double> sum(n, 0.0), mf(n), mg(n);
        for (std::size_t i = 0; i < n; ++i) {
            mf[i] = encF[i].mid();
            mg[i] = encG[i].mid();
            sum[i] = mf[i] + mg[i];
        }
        candidates.push_back(sum);
        candidates.push_back(mf);
        candidates.push_back(mg);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> axis(n, 0.0);
            axis[i] = 1.0;
            candidates.push_back(axis);
            axis[i] = -1.0;
            candidates.push_back(axis);
        }
        for (const auto& d : candidates) {
            double nn = 0;
            for (double c : d) nn += c * c;
            if (nn < 1e-300) continue;
            Interval df{0.0, 0.0}, dg{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                df = df + encF[i] * Interval{d[i], d[i]};
                dg = dg + encG[i] * Interval{d[i], d[i]};
            }
            if (df.lo > 0 && dg.lo > 0) return true;
        }
        return false;
    };

    std::deque<Cell> work;
    for (const auto& c : cells) work.push_back({c, 0});
    while (!work.empty()) {
        Cell c = work.front();
        work.pop_front();
        if (half_space_ok(c.box)) continue;
        if (c.depth < depth_cap) {
            auto [a, b] = c.box.split(c.box.widest_dim());
            work.push_back({a, c.depth + 1});
            work.push_back({b, c.depth + 1});
        } else {
            cert.certified = false;
            cert.refused_cells.push_back(c.box);
        }
    }
    return cert;
}

std::vector<IntervalBox> annulus_cells(double r_inner, double r_outer, int resolution) {
    std::vector<IntervalBox> cells;
    const double w = 2.0 * r_outer / resolution;
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
            IntervalBox cell({Interval{-r_outer + i * w, -r_outer + (i + 1) * w},
                              Interval{-r_outer + j * w, -r_outer + (j + 1) * w}});
            // keep cells meeting the closed annulus
            const double nearx = cell[0].mig(), neary = cell[1].mig();
            const double farx = cell[0].mag(), fary = cell[1].mag();
            const double dmin = std::hypot(nearx, neary);
            const double dmax = std::hypot(farx, fary);
            if (dmax >= r_inner && dmin <= r_outer) cells.push_back(cell);
        }
    return cells;
}

long coincidence_number(const VectorFieldSpec& a, const VectorFieldSpec& b,
                        const LoopCycle& loop) {
    const auto da = winding_number(a, loop);
    const auto db = winding_number(b, loop);
    return db.degree - da.degree;
}

BoundaryClassPair boundary_class_pair(const VectorFieldSpec& field, const LoopCycle& boundary) {
    const auto w = winding_number(field, boundary);
    BoundaryClassPair p;
    p.base = 1;
    p.fiber = w.degree;
    p.status = w.status;
    return p;
}

} // namespace stabcheck

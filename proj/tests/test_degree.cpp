#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "stabcheck/field.hpp"

using namespace stabcheck;

namespace {

// complex power field z^k (k >= 0) or conj(z)^|k| (k < 0) as expression trees
VectorFieldSpec complex_power_field(int k) {
    ExprPtr x = Expr::variable("x1");
    ExprPtr y = Expr::variable("x2");
    if (k < 0) y = Expr::unary(UnaryOp::Neg, y);
    ExprPtr re = Expr::constant(1.0);
    ExprPtr im = Expr::constant(0.0);
    for (int i = 0; i < std::abs(k); ++i) {
        ExprPtr nre = Expr::binary(BinaryOp::Sub, Expr::binary(BinaryOp::Mul, re, x),
                                   Expr::binary(BinaryOp::Mul, im, y));
        ExprPtr nim = Expr::binary(BinaryOp::Add, Expr::binary(BinaryOp::Mul, re, y),
                                   Expr::binary(BinaryOp::Mul, im, x));
        re = nre;
        im = nim;
    }
    return VectorFieldSpec::from_asts({re, im});
}

// pointwise complex product of two 2-D fields
VectorFieldSpec complex_product(const VectorFieldSpec& a, const VectorFieldSpec& b) {
    ExprPtr re = Expr::binary(BinaryOp::Sub,
                              Expr::binary(BinaryOp::Mul, a.components[0], b.components[0]),
                              Expr::binary(BinaryOp::Mul, a.components[1], b.components[1]));
    ExprPtr im = Expr::binary(BinaryOp::Add,
                              Expr::binary(BinaryOp::Mul, a.components[0], b.components[1]),
                              Expr::binary(BinaryOp::Mul, a.components[1], b.components[0]));
    return VectorFieldSpec::from_asts({re, im});
}

// random complex polynomial c0 + c1 z + ... of small degree
VectorFieldSpec random_poly_field(std::mt19937& rng, int max_deg) {
    std::uniform_int_distribution<int> degd(1, max_deg);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const int deg = degd(rng);
    ExprPtr re = Expr::constant(0.0);
    ExprPtr im = Expr::constant(0.0);
    for (int j = 0; j <= deg; ++j) {
        auto zj = complex_power_field(j);
        const double cr = coef(rng), ci = coef(rng);
        re = Expr::binary(
            BinaryOp::Add, re,
            Expr::binary(BinaryOp::Sub,
                         Expr::binary(BinaryOp::Mul, Expr::constant(cr), zj.components[0]),
                         Expr::binary(BinaryOp::Mul, Expr::constant(ci), zj.components[1])));
        im = Expr::binary(
            BinaryOp::Add, im,
            Expr::binary(BinaryOp::Add,
                         Expr::binary(BinaryOp::Mul, Expr::constant(cr), zj.components[1]),
                         Expr::binary(BinaryOp::Mul, Expr::constant(ci), zj.components[0])));
    }
    return VectorFieldSpec::from_asts({re, im});
}

double min_norm_on_circle(const VectorFieldSpec& f, double r, int samples = 512) {
    double m = 1e300;
    for (int k = 0; k < samples; ++k) {
        const double t = 2 * M_PI * k / samples;
        m = std::min(m, f.norm_at({r * std::cos(t), r * std::sin(t)}));
    }
    return m;
}

// dense angle-accumulation oracle, independent of the production path
long winding_oracle(const VectorFieldSpec& f, double radius, int samples = 100000) {
    double total = 0;
    double prev = 0;
    double first = 0;
    for (int k = 0; k <= samples; ++k) {
        const double t = 2 * M_PI * k / samples;
        const auto v = f.eval({radius * std::cos(t), radius * std::sin(t)});
        const double a = std::atan2(v[1], v[0]);
        if (k == 0) {
            first = prev = a;
            continue;
        }
        double d = a - prev;
        while (d > M_PI) d -= 2 * M_PI;
        while (d < -M_PI) d += 2 * M_PI;
        total += d;
        prev = a;
    }
    (void)first;
    return std::lround(total / (2 * M_PI));
}

// signed preimage count of a regular direction, for mapping degree
long preimage_count_oracle(const VectorFieldSpec& f, const SurfaceMesh& sphere,
                           std::array<double, 3> d) {
    SurfaceMesh mesh = sphere;
    for (int i = 0; i < 2; ++i) mesh = refined(mesh);
    long count = 0;
    for (const auto& t : mesh.triangles) {
        std::array<std::array<double, 3>, 3> u;
        for (int i = 0; i < 3; ++i) {
            const auto& p = mesh.vertices[t[i]];
            const auto v = f.eval({p[0], p[1], p[2]});
            const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            u[i] = {v[0] / n, v[1] / n, v[2] / n};
        }
        // solve d = alpha u0 + beta u1 + gamma u2
        double M[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) M[r][c] = u[c][r];
        const double det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
        if (std::abs(det) < 1e-12) continue;
        auto solve = [&](int col) {
            double A[3][3];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) A[r][c] = (c == col) ? d[r] : M[r][c];
            return (A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                    A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                    A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0])) /
                   det;
        };
        const double alpha = solve(0), beta = solve(1), gamma = solve(2);
        if (alpha > 1e-9 && beta > 1e-9 && gamma > 1e-9) count += det > 0 ? 1 : -1;
    }
    return count;
}

} // namespace

TEST_CASE("winding: linear sink is +1, certified") {
    auto f = VectorFieldSpec::parse(2, {"-x1", "-x2"});
    auto r = winding_number(f, make_circle_loop({0, 0}, 1.0, 64));
    CHECK(r.degree == 1);
    CHECK(r.status == CertStatus::Certified);
    CHECK(r.min_norm > 0.9);
}

TEST_CASE("winding: z^2 field is 2, matches dense oracle") {
    auto f = VectorFieldSpec::parse(2, {"x1^2 - x2^2", "2*x1*x2"});
    auto r = winding_number(f, make_circle_loop({0, 0}, 1.0, 64));
    CHECK(r.degree == 2);
    CHECK(r.status == CertStatus::Certified);
    CHECK(winding_oracle(f, 1.0) == 2);
}

TEST_CASE("winding: constant field is 0 on any loop") {
    auto f = VectorFieldSpec::parse(2, {"1", "0"});
    LoopCycle wavy;
    for (int k = 0; k < 40; ++k) {
        const double t = 2 * M_PI * k / 40;
        const double rr = 1.0 + 0.3 * std::sin(3 * t);
        wavy.vertices.push_back({rr * std::cos(t), rr * std::sin(t)});
    }
    auto r = winding_number(f, wavy);
    CHECK(r.degree == 0);
    CHECK(r.status == CertStatus::Certified);
}

TEST_CASE("winding: zero on loop is an error naming the point") {
    auto f = VectorFieldSpec::parse(2, {"x1 - 1", "x2"});
    CHECK_THROWS_AS(winding_number(f, make_circle_loop({0, 0}, 1.0, 64)), DegreeError);
}

TEST_CASE("winding: z^k certified for k in -3..3") {
    for (int k = -3; k <= 3; ++k) {
        auto f = complex_power_field(k);
        auto r = winding_number(f, make_circle_loop({0, 0}, 1.0, 128));
        CHECK(r.degree == k);
        CHECK(r.status == CertStatus::Certified);
    }
}

TEST_CASE("winding: parametric route agrees") {
    const std::vector<std::string> tv = {"t"};
    auto x = parse_expression("cos(2*pi*t)", tv);
    auto y = parse_expression("sin(2*pi*t)", tv);
    auto r = winding_number_param(x, y);
    CHECK(r.degree == 1);
    CHECK(r.status == CertStatus::Certified);

    auto x2 = parse_expression("cos(4*pi*t)", tv);
    auto y2 = parse_expression("sin(4*pi*t)", tv);
    CHECK(winding_number_param(x2, y2).degree == 2);
}

TEST_CASE("property: loop orientation reversal negates the degree") {
    std::mt19937 rng(11);
    int done = 0;
    while (done < 20) {
        auto f = random_poly_field(rng, 3);
        if (min_norm_on_circle(f, 1.0) < 0.2) continue;
        auto loop = make_circle_loop({0, 0}, 1.0, 96);
        CHECK(winding_number(f, loop).degree == -winding_number(f, reversed(loop)).degree);
        ++done;
    }
}

TEST_CASE("property: multiplicativity of complex products") {
    std::mt19937 rng(12);
    int done = 0;
    while (done < 50) {
        auto a = random_poly_field(rng, 3);
        auto b = random_poly_field(rng, 3);
        if (min_norm_on_circle(a, 1.0) < 0.2 || min_norm_on_circle(b, 1.0) < 0.2) continue;
        auto loop = make_circle_loop({0, 0}, 1.0, 128);
        const long wa = winding_number(a, loop).degree;
        const long wb = winding_number(b, loop).degree;
        const long wab = winding_number(complex_product(a, b), loop).degree;
        CHECK(wab == wa + wb);
        ++done;
    }
}

TEST_CASE("property: homotopy invariance on 100 certified perturbation pairs") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> eps(-0.05, 0.05);
    auto cells = annulus_cells(0.9, 1.1, 24);
    int done = 0;
    while (done < 100) {
        auto g = random_poly_field(rng, 3);
        if (min_norm_on_circle(g, 1.0) < 0.4) continue;
        // small constant perturbation
        auto f = VectorFieldSpec::from_asts(
            {Expr::binary(BinaryOp::Add, g.components[0], Expr::constant(eps(rng))),
             Expr::binary(BinaryOp::Add, g.components[1], Expr::constant(eps(rng)))});
        auto cert = homotopy_nonvanishing(f, g, cells);
        if (!cert.certified) continue;
        auto loop = make_circle_loop({0, 0}, 1.0, 96);
        CHECK(winding_number(f, loop).degree == winding_number(g, loop).degree);
        ++done;
    }
}

TEST_CASE("homotopy_nonvanishing: examples") {
    auto g = VectorFieldSpec::parse(2, {"-x1", "-x2"});
    CHECK(homotopy_nonvanishing(g, g, annulus_cells(0.25, 1.0, 16)).certified);

    // positively colinear normalized copy (expressed with sqrt)
    auto gn = VectorFieldSpec::parse(2, {"-x1/sqrt(x1^2 + x2^2)", "-x2/sqrt(x1^2 + x2^2)"});
    CHECK(homotopy_nonvanishing(gn, g, annulus_cells(0.25, 1.0, 16)).certified);

    auto plus = VectorFieldSpec::parse(2, {"1", "0"});
    auto minus = VectorFieldSpec::parse(2, {"-1", "0"});
    auto refused = homotopy_nonvanishing(plus, minus, {IntervalBox::cube(2, -0.1, 0.1)});
    CHECK_FALSE(refused.certified);
    CHECK_FALSE(refused.refused_cells.empty());
}

TEST_CASE("mapping_degree: identity and antipodal") {
    auto sphere = make_icosphere({0, 0, 0}, 1.0, 2);
    auto id = VectorFieldSpec::parse(3, {"x1", "x2", "x3"});
    auto rid = mapping_degree(id, sphere);
    CHECK(rid.degree == 1);
    CHECK(rid.status == CertStatus::Certified);

    auto anti = VectorFieldSpec::parse(3, {"-x1", "-x2", "-x3"});
    auto ra = mapping_degree(anti, sphere);
    CHECK(ra.degree == -1);
    CHECK(ra.status == CertStatus::Certified);
}

TEST_CASE("mapping_degree: z^2 lift has degree 2, matches preimage oracle") {
    auto f = VectorFieldSpec::parse(3, {"x1^2 - x2^2", "2*x1*x2", "x3"});
    auto sphere = make_icosphere({0, 0, 0}, 1.0, 2);
    auto r = mapping_degree(f, sphere);
    CHECK(r.degree == 2);
    // directions chosen away from image-mesh edges (regular values)
    const double m1 = std::sqrt(1.0 + 0.09 + 0.0049);
    CHECK(preimage_count_oracle(f, sphere, {1.0 / m1, 0.3 / m1, 0.07 / m1}) == 2);
    const double m2 = std::sqrt(14.0);
    CHECK(preimage_count_oracle(VectorFieldSpec::parse(3, {"x1", "x2", "x3"}), sphere,
                                {1.0 / m2, 2.0 / m2, 3.0 / m2}) == 1);
}

TEST_CASE("mapping_degree: zero on mesh rejected") {
    auto f = VectorFieldSpec::parse(3, {"x1 - 1", "x2", "x3"});
    CHECK_THROWS_AS(mapping_degree(f, make_icosphere({0, 0, 0}, 1.0, 1)), DegreeError);
}

TEST_CASE("coincidence_number: examples and antisymmetry-style oracle") {
    auto loop = make_circle_loop({0, 0}, 1.0, 96);
    auto constant = VectorFieldSpec::parse(2, {"1", "0"});
    auto identity = VectorFieldSpec::parse(2, {"x1", "x2"});
    auto zsq = VectorFieldSpec::parse(2, {"x1^2 - x2^2", "2*x1*x2"});

    CHECK(coincidence_number(constant, identity, loop) == 1);
    CHECK(coincidence_number(identity, identity, loop) == 0);
    CHECK(coincidence_number(identity, zsq, loop) == 1);

    // signed coincidence counting oracle on random pairs: the relative map
    // b * conj(a) winds exactly deg(b) - deg(a) times
    std::mt19937 rng(14);
    int done = 0;
    while (done < 20) {
        auto a = random_poly_field(rng, 3);
        auto b = random_poly_field(rng, 3);
        if (min_norm_on_circle(a, 1.0) < 0.25 || min_norm_on_circle(b, 1.0) < 0.25) continue;
        auto conj_a = VectorFieldSpec::from_asts(
            {a.components[0], Expr::unary(UnaryOp::Neg, a.components[1])});
        const long rel = winding_oracle(complex_product(b, conj_a), 1.0, 20000);
        CHECK(coincidence_number(a, b, loop) == rel);
        ++done;
    }
}

TEST_CASE("boundary_class_pair: inward field vs constant field") {
    auto loop = make_circle_loop({0, 0}, 1.0, 96);
    auto g = boundary_class_pair(VectorFieldSpec::parse(2, {"-x1", "-x2"}), loop);
    CHECK(g.base == 1);
    CHECK(g.fiber == 1);  // chi(disk)

    auto f = boundary_class_pair(VectorFieldSpec::parse(2, {"1", "0"}), loop);
    CHECK(f.base == 1);
    CHECK(f.fiber == 0);

    // (1, w_G) in Z*(1, w_F) iff w_G == w_F; here 1 != 0
    CHECK(g.fiber != f.fiber);
}

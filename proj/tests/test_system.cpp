#include <doctest.h>

#include <cmath>

#include "stabcheck/sublevel.hpp"
#include "stabcheck/system.hpp"

using namespace stabcheck;

namespace {

ControlSystemSpec brockett_integrator(double box = 2.0) {
    return ControlSystemSpec::parse("brockett_integrator", 3, 2, BundleKind::TrivialVector,
                                    {"u1", "u2", "u1*x2 - u2*x1"},
                                    IntervalBox::cube(2, -box, box));
}

ControlSystemSpec single_integrator(double box = 1.0) {
    return ControlSystemSpec::parse("single_integrator_2d", 2, 2, BundleKind::TrivialVector,
                                    {"u1", "u2"}, IntervalBox::cube(2, -box, box));
}

// unit-norm fiber over R^2, parametrized by the angle u1
ControlSystemSpec circle_bundle() {
    auto sys = ControlSystemSpec::parse("example5_circle_bundle", 2, 1, BundleKind::FiberSampled,
                                        {"cos(u1)", "sin(u1)"},
                                        IntervalBox({Interval{0.0, 2 * M_PI}}));
    sys.declared_fiber_norm = 1.0;
    return sys;
}

SimplicialComplex circle_polyline(double radius, int sides, double cx = 0, double cy = 0) {
    std::map<int, std::vector<double>> coords;
    std::vector<Simplex> edges;
    for (int i = 0; i < sides; ++i) {
        const double t = 2 * M_PI * i / sides;
        coords[i] = {cx + radius * std::cos(t), cy + radius * std::sin(t)};
        edges.push_back({i, (i + 1) % sides});
    }
    return SimplicialComplex::build(edges, coords);
}

} // namespace

TEST_CASE("evaluate_dynamics: worked instances") {
    auto sys = brockett_integrator();
    auto v = evaluate_dynamics(sys, {1, 2, 3}, {1, 1});
    CHECK(v == std::vector<double>{1, 1, 1});

    auto si = single_integrator();
    CHECK(evaluate_dynamics(si, {0.7, -0.2}, {0.3, -0.1}) == std::vector<double>{0.3, -0.1});

    auto e5 = circle_bundle();
    auto w = evaluate_dynamics(e5, {5, -2}, {0});
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(evaluate_dynamics(si, {0, 0}, {5, 0}), SystemError);  // out of box
    CHECK_THROWS_AS(evaluate_dynamics(si, {0, 0, 0}, {0, 0}), SystemError);
}

TEST_CASE("parse: component count and zero section validated") {
    CHECK_THROWS_AS(ControlSystemSpec::parse("bad", 2, 2, BundleKind::TrivialVector,
                                             {"u1", "u2", "u1"}, IntervalBox::cube(2, -1, 1)),
                    SystemError);
    CHECK_THROWS_AS(ControlSystemSpec::parse("bad", 2, 2, BundleKind::TrivialVector,
                                             {"u1", "u2"}, IntervalBox::cube(2, 0.5, 1.0)),
                    SystemError);
}

TEST_CASE("fiber_min_norm: unit circle bundle bounds below by ~1") {
    auto e5 = circle_bundle();
    const double bound = fiber_min_norm(e5, IntervalBox::cube(2, -1, 1));
    CHECK(bound >= 0.99);
    CHECK(bound <= 1.0 + 1e-9);
}

TEST_CASE("fiber_min_norm: zero section forces bound 0") {
    CHECK(fiber_min_norm(single_integrator(), IntervalBox::cube(2, -1, 1)) == 0.0);
    CHECK(fiber_min_norm(brockett_integrator(), IntervalBox::cube(3, -1, 1)) == 0.0);
}

TEST_CASE("fiber_min_norm: monotone in the region") {
    // fiber norm depends on x here: f = (u1 + x1, 2)
    auto sys = ControlSystemSpec::parse("shifted", 2, 1, BundleKind::FiberSampled,
                                        {"u1 + x1", "2"}, IntervalBox({Interval{-0.5, 0.5}}));
    const double small = fiber_min_norm(sys, IntervalBox::cube(2, -0.1, 0.1));
    const double large = fiber_min_norm(sys, IntervalBox::cube(2, -1.0, 1.0));
    CHECK(small >= large);
    CHECK(small >= 1.99);
}

TEST_CASE("chi_of_target: point, circle, two points, sphere") {
    CHECK(chi_of_target(TargetSet::make_point({0, 0})) == 1);
    CHECK(chi_of_target(TargetSet::make_triangulated(circle_polyline(1.0, 12))) == 0);

    std::map<int, std::vector<double>> coords = {{0, {0, 0}}, {1, {1, 0}}};
    auto two = SimplicialComplex::build({{0}, {1}}, coords);
    CHECK(chi_of_target(TargetSet::make_triangulated(two)) == 2);
}

TEST_CASE("bounded_domain: circle fills to a disk with chi 1") {
    auto A = TargetSet::make_hypersurface(circle_polyline(1.0, 24));
    auto dom = bounded_domain(A, 32);
    CHECK(dom.chi == 1);
    auto prof = homology_profile(dom.region);
    CHECK(prof.euler == 1);
    CHECK(prof.betti[0] == 1);
    CHECK(prof.betti[1] == 0);
}

TEST_CASE("bounded_domain: sphere fills to a ball with chi 1") {
    auto spec = LyapunovSpec::parse("x1^2 + x2^2 + x3^2", 3, 1.0, IntervalBox::cube(3, -1.5, 1.5));
    auto b = extract_sublevel_boundary(spec, 10);
    auto A = TargetSet::make_hypersurface(boundary_complex(b));
    auto dom = bounded_domain(A, 12);
    CHECK(dom.chi == 1);
    auto prof = homology_profile(dom.region);
    CHECK(prof.euler == 1);
    CHECK(prof.betti[0] == 1);
}

TEST_CASE("bounded_domain: two nested circles rejected") {
    std::map<int, std::vector<double>> coords;
    std::vector<Simplex> edges;
    for (int ring = 0; ring < 2; ++ring) {
        const double r = ring == 0 ? 1.0 : 0.5;
        for (int i = 0; i < 12; ++i) {
            const double t = 2 * M_PI * i / 12;
            coords[ring * 12 + i] = {r * std::cos(t), r * std::sin(t)};
            edges.push_back({ring * 12 + i, ring * 12 + (i + 1) % 12});
        }
    }
    auto A = TargetSet::make_hypersurface(SimplicialComplex::build(edges, coords));
    CHECK_THROWS_AS(bounded_domain(A, 24), SystemError);
}

TEST_CASE("bounded_domain: self-crossing polyline rejected") {
    // figure-eight style crossing
    std::map<int, std::vector<double>> coords = {
        {0, {0, 0}}, {1, {1, 0}}, {2, {0, 1}}, {3, {1, 1}}};
    std::vector<Simplex> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    auto A = TargetSet::make_hypersurface(SimplicialComplex::build(edges, coords));
    CHECK_THROWS_AS(bounded_domain(A, 16), SystemError);
}

TEST_CASE("subgroup image: gcd bookkeeping") {
    SubgroupImage s;
    CHECK(s.d == 0);
    s.add("a", 0);
    CHECK(s.d == 0);
    s.add("b", 6);
    CHECK(s.d == 6);
    s.add("c", -4);
    CHECK(s.d == 2);
    s.add("d", 1);
    CHECK(s.d == 1);
}

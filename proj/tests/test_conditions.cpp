#include <doctest.h>

#include <cmath>

#include "stabcheck/conditions.hpp"

using namespace stabcheck;

namespace {

ControlSystemSpec single_integrator() {
    return ControlSystemSpec::parse("single_integrator", 2, 2, BundleKind::TrivialVector,
                                    {"u1", "u2"}, IntervalBox::cube(2, -1.0, 1.0));
}

ControlSystemSpec nonholonomic_integrator() {
    auto sys = ControlSystemSpec::parse("nonholonomic_integrator", 3, 2,
                                        BundleKind::TrivialVector,
                                        {"u1", "u2", "u1*x2 - u2*x1"},
                                        IntervalBox::cube(2, -2.0, 2.0));
    sys.control_homogeneity = 1;
    return sys;
}

ControlSystemSpec circle_bundle() {
    auto sys = ControlSystemSpec::parse("circle_bundle", 2, 1, BundleKind::FiberSampled,
                                        {"cos(u1)", "sin(u1)"},
                                        IntervalBox(std::vector<Interval>{{0.0, 6.3}}));
    sys.declared_fiber_norm = 1.0;
    return sys;
}

CycleSpec section_cycle_2d(const std::string& desc, const std::vector<std::string>& section,
                           double radius) {
    CycleSpec c;
    c.description = desc;
    c.loop = make_circle_loop({0.0, 0.0}, radius, 96);
    for (const auto& s : section) c.section.push_back(parse_expression(s, {"x1", "x2"}));
    return c;
}

CycleSpec section_cycle_3d(const std::string& desc, const std::vector<std::string>& section,
                           double radius) {
    CycleSpec c;
    c.description = desc;
    c.sphere = make_icosphere({0.0, 0.0, 0.0}, radius, 2);
    for (const auto& s : section)
        c.section.push_back(parse_expression(s, {"x1", "x2", "x3"}));
    return c;
}

constexpr const char* kTwoPiT = "6.283185307179586*t";

CycleSpec angle_sweep_cycle() {
    // x(t) runs the unit circle while the fiber parameter sweeps one full turn
    CycleSpec c;
    c.description = "unit circle with full fiber sweep";
    c.parametric = true;
    c.state_of_t = {parse_expression(std::string("cos(") + kTwoPiT + ")", {"t"}),
                    parse_expression(std::string("sin(") + kTwoPiT + ")", {"t"})};
    c.control_of_t = {parse_expression(kTwoPiT, {"t"})};
    return c;
}

} // namespace

TEST_CASE("brockett: planar integrator reaches every small target") {
    auto sys = single_integrator();
    auto verdict = check_brockett(sys, TargetSet::make_point({0.0, 0.0}), 0.5,
                                  IntervalBox::cube(2, -1.0, 1.0));
    CHECK(verdict.status == Verdict::Holds);
}

TEST_CASE("brockett: nonholonomic integrator misses the vertical axis") {
    auto sys = nonholonomic_integrator();
    const auto box = IntervalBox::cube(3, -2.0, 2.0);
    auto verdict = check_brockett(sys, TargetSet::make_point({0.0, 0.0, 0.0}), 0.1, box);
    REQUIRE(verdict.status == Verdict::Fails);
    REQUIRE(verdict.witness_v.size() == 3);
    CHECK(verdict.witness_v[0] == 0.0);
    CHECK(verdict.witness_v[1] == 0.0);
    CHECK(std::abs(verdict.witness_v[2]) > 0.0);
    CHECK(verdict.witness_bound > 0.0);

    CHECK(recheck_brockett_witness(sys, box, verdict.witness_v, verdict.witness_bound));
    CHECK_FALSE(recheck_brockett_witness(sys, box, verdict.witness_v,
                                         100.0 * verdict.witness_bound));
    // an actually reachable target must not recheck
    CHECK_FALSE(recheck_brockett_witness(sys, box, {0.1, 0.0, 0.0}, 1e-6));
}

TEST_CASE("brockett: failure persists for smaller delta") {
    auto sys = nonholonomic_integrator();
    const auto box = IntervalBox::cube(3, -2.0, 2.0);
    auto verdict = check_brockett(sys, TargetSet::make_point({0.0, 0.0, 0.0}), 0.05, box);
    CHECK(verdict.status == Verdict::Fails);
}

TEST_CASE("adversary: constant family agrees with the reachability check") {
    auto sys = single_integrator();
    const auto A = TargetSet::make_point({0.0, 0.0});
    const auto box = IntervalBox::cube(2, -1.0, 1.0);
    auto direct = check_brockett(sys, A, 0.5, box);
    auto family = check_adversary(sys, A, 0.5, AdversaryFamily::Constant, box);
    CHECK(family.status == direct.status);
    CHECK(family.condition == "adversary");
}

TEST_CASE("adversary: unit-norm fiber defeats every perturbation up to 0.9") {
    auto sys = circle_bundle();
    auto verdict = check_adversary(sys, TargetSet::make_point({0.0, 0.0}), 0.9,
                                   AdversaryFamily::DisjointnessProbe,
                                   IntervalBox::cube(2, -1.0, 1.0));
    REQUIRE(verdict.status == Verdict::Fails);
    CHECK(verdict.witness_bound >= 0.99);
}

TEST_CASE("adversary: probe is inconclusive past the fiber norm") {
    auto sys = circle_bundle();
    auto verdict = check_adversary(sys, TargetSet::make_point({0.0, 0.0}), 1.1,
                                   AdversaryFamily::DisjointnessProbe,
                                   IntervalBox::cube(2, -1.0, 1.0));
    CHECK(verdict.status == Verdict::Unknown);
}

TEST_CASE("image subgroup: linear feedback section generates everything") {
    auto sys = single_integrator();
    std::vector<CycleSpec> cycles = {
        section_cycle_2d("radial inward section", {"-x1", "-x2"}, 1.0),
        section_cycle_2d("constant section", {"1", "0"}, 1.0)};
    auto image = coron_image_subgroup(sys, cycles);
    CHECK(image.d == 1);
    REQUIRE(image.cycles.size() == 2);
    CHECK(image.cycles[0].second == 1);
    CHECK(image.cycles[1].second == 0);
}

TEST_CASE("image subgroup: parametric fiber sweep has degree one") {
    auto sys = circle_bundle();
    auto image = coron_image_subgroup(sys, {angle_sweep_cycle()});
    CHECK(image.d == 1);
}

TEST_CASE("image subgroup: nonholonomic sections all land at degree zero") {
    auto sys = nonholonomic_integrator();
    std::vector<CycleSpec> cycles = {
        section_cycle_3d("constant section", {"1", "0.5"}, 1.2),
        section_cycle_3d("height-modulated section", {"1 + 0.25*x3", "0.5 - 0.125*x3"}, 1.2)};
    auto image = coron_image_subgroup(sys, cycles);
    CHECK(image.d == 0);
    for (const auto& [desc, deg] : image.cycles) CHECK(deg == 0);
}

TEST_CASE("image subgroup: vanishing lift is rejected") {
    auto sys = nonholonomic_integrator();
    // u = (x1, x2) makes the lift vanish at the poles of the sphere
    CHECK_THROWS_AS(
        coron_image_subgroup(sys, {section_cycle_3d("linear section", {"x1", "x2"}, 1.0)}),
        ConditionError);
}

TEST_CASE("avoidance: nonholonomic image stays clear of the vertical axis") {
    auto sys = nonholonomic_integrator();
    auto cert = image_avoidance_certificate(sys, 2, IntervalBox::cube(3, -2.0, 2.0), 0.25);
    REQUIRE(cert.valid);
    CHECK(cert.scale_floor == 0.0);  // homogeneity extends the bound to all scales
}

TEST_CASE("avoidance: an over-greedy cone constant is refused") {
    auto sys = nonholonomic_integrator();
    // kappa = 2 demands ||(u1,u2)|| >= 2|u1 x2 - u2 x1|, false at x = (0,2)
    auto cert = image_avoidance_certificate(sys, 2, IntervalBox::cube(3, -2.0, 2.0), 2.0);
    CHECK_FALSE(cert.valid);
}

TEST_CASE("mansouri: planar integrator with a point target holds") {
    auto sys = single_integrator();
    auto verdict = check_mansouri(sys, TargetSet::make_point({0.0, 0.0}),
                                  {section_cycle_2d("radial section", {"-x1", "-x2"}, 1.0)});
    CHECK(verdict.status == Verdict::Holds);
}

TEST_CASE("mansouri: avoidance certificate forces failure at a point target") {
    auto sys = nonholonomic_integrator();
    auto cert = image_avoidance_certificate(sys, 2, IntervalBox::cube(3, -2.0, 2.0), 0.25);
    REQUIRE(cert.valid);
    auto verdict = check_mansouri(sys, TargetSet::make_point({0.0, 0.0, 0.0}),
                                  {section_cycle_3d("constant section", {"1", "0.5"}, 1.2)},
                                  cert);
    CHECK(verdict.status == Verdict::Fails);
}

TEST_CASE("mansouri: without exhaustiveness the verdict stays unknown") {
    auto sys = nonholonomic_integrator();
    auto verdict = check_mansouri(sys, TargetSet::make_point({0.0, 0.0, 0.0}),
                                  {section_cycle_3d("constant section", {"1", "0.5"}, 1.2)});
    CHECK(verdict.status == Verdict::Unknown);
}

TEST_CASE("mansouri: conflicting certificates are an internal error") {
    auto sys = single_integrator();
    AvoidanceCertificate fake;
    fake.valid = true;
    fake.axis = 0;
    fake.kappa = 1.0;
    CHECK_THROWS_AS(
        check_mansouri(sys, TargetSet::make_point({0.0, 0.0}),
                       {section_cycle_2d("radial section", {"-x1", "-x2"}, 1.0)}, fake),
        ConditionError);
}

TEST_CASE("homology: planar integrator with validated reference field holds") {
    auto sys = single_integrator();
    auto G = VectorFieldSpec::parse(2, {"-x1", "-x2"});
    auto lyap = LyapunovSpec::parse("x1^2 + x2^2", 2, 0.5, IntervalBox::cube(2, -1.0, 1.0));
    auto verdict = check_homology_euclidean(
        sys, TargetSet::make_point({0.0, 0.0}), G, lyap,
        {section_cycle_2d("radial section", {"-x1", "-x2"}, 1.0)});
    CHECK(verdict.status == Verdict::Holds);
}

TEST_CASE("homology: circle bundle holds via the parametric sweep") {
    auto sys = circle_bundle();
    auto G = VectorFieldSpec::parse(2, {"-x1", "-x2"});
    auto lyap = LyapunovSpec::parse("x1^2 + x2^2", 2, 0.5, IntervalBox::cube(2, -1.0, 1.0));
    auto verdict = check_homology_euclidean(sys, TargetSet::make_point({0.0, 0.0}), G, lyap,
                                            {angle_sweep_cycle()});
    CHECK(verdict.status == Verdict::Holds);
}

TEST_CASE("homology: an expanding reference field is rejected") {
    auto sys = single_integrator();
    auto G = VectorFieldSpec::parse(2, {"x1", "x2"});  // outward, not stabilizing
    auto lyap = LyapunovSpec::parse("x1^2 + x2^2", 2, 0.5, IntervalBox::cube(2, -1.0, 1.0));
    CHECK_THROWS_AS(check_homology_euclidean(sys, TargetSet::make_point({0.0, 0.0}), G, lyap,
                                             {section_cycle_2d("radial", {"-x1", "-x2"}, 1.0)}),
                    ConditionError);
}

TEST_CASE("audit: legitimate instances produce no contradictions") {
    std::vector<AuditInstance> instances;

    AuditInstance si;
    si.sys = single_integrator();
    si.A = TargetSet::make_point({0.0, 0.0});
    si.G_ref = VectorFieldSpec::parse(2, {"-x1", "-x2"});
    si.lyap = LyapunovSpec::parse("x1^2 + x2^2", 2, 0.5, IntervalBox::cube(2, -1.0, 1.0));
    si.cycles = {section_cycle_2d("radial section", {"-x1", "-x2"}, 1.0)};
    si.delta = 0.5;
    si.state_box = IntervalBox::cube(2, -1.0, 1.0);
    instances.push_back(si);

    AuditInstance nh;
    nh.sys = nonholonomic_integrator();
    nh.A = TargetSet::make_point({0.0, 0.0, 0.0});
    nh.cycles = {section_cycle_3d("constant section", {"1", "0.5"}, 1.2)};
    nh.avoidance = image_avoidance_certificate(nh.sys, 2, IntervalBox::cube(3, -2.0, 2.0), 0.25);
    nh.delta = 0.1;
    nh.state_box = IntervalBox::cube(3, -2.0, 2.0);
    instances.push_back(nh);

    AuditInstance cb;
    cb.sys = circle_bundle();
    cb.A = TargetSet::make_point({0.0, 0.0});
    cb.G_ref = VectorFieldSpec::parse(2, {"-x1", "-x2"});
    cb.lyap = LyapunovSpec::parse("x1^2 + x2^2", 2, 0.5, IntervalBox::cube(2, -1.0, 1.0));
    cb.cycles = {angle_sweep_cycle()};
    cb.family = AdversaryFamily::DisjointnessProbe;
    cb.delta = 0.9;
    cb.state_box = IntervalBox::cube(2, -1.0, 1.0);
    instances.push_back(cb);

    auto report = audit_implications(instances);
    REQUIRE(report.records.size() == 3);
    CHECK(report.contradictions.empty());
    REQUIRE(report.independence_witnesses.size() == 1);
    CHECK(report.independence_witnesses[0].find("circle_bundle") != std::string::npos);

    CHECK(report.records[0].brockett.status == Verdict::Holds);
    CHECK(report.records[1].brockett.status == Verdict::Fails);
    CHECK(report.records[1].mansouri.status == Verdict::Fails);
    CHECK(report.records[2].homology.status == Verdict::Holds);
    CHECK_FALSE(report.records[2].gate_applicable);
}

TEST_CASE("audit: a mislabeled bundle raises exactly one flag") {
    AuditInstance cb;
    cb.sys = circle_bundle();
    cb.sys.bundle_kind = BundleKind::VectorBundleDeclared;  // deliberate mislabel
    cb.A = TargetSet::make_point({0.0, 0.0});
    cb.G_ref = VectorFieldSpec::parse(2, {"-x1", "-x2"});
    cb.lyap = LyapunovSpec::parse("x1^2 + x2^2", 2, 0.5, IntervalBox::cube(2, -1.0, 1.0));
    cb.cycles = {angle_sweep_cycle()};
    cb.family = AdversaryFamily::DisjointnessProbe;
    cb.delta = 0.9;
    cb.state_box = IntervalBox::cube(2, -1.0, 1.0);

    auto report = audit_implications({cb});
    REQUIRE(report.contradictions.size() == 1);
    CHECK(report.independence_witnesses.empty());
}

#include "stabcheck/catalog.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace stabcheck {

namespace {

constexpr double kTwoPi = 6.283185307179586;

SimplicialComplex circle_polyline(double radius, int sides) {
    std::map<int, std::vector<double>> coords;
    std::vector<Simplex> edges;
    for (int i = 0; i < sides; ++i) {
        const double t = kTwoPi * i / sides;
        coords[i] = {radius * std::cos(t), radius * std::sin(t)};
        edges.push_back({i, (i + 1) % sides});
    }
    return SimplicialComplex::build(edges, coords);
}

CycleSpec section_cycle_2d(const std::string& desc, const std::vector<std::string>& section,
                           double radius) {
    CycleSpec c;
    c.description = desc;
    c.loop = make_circle_loop({0.0, 0.0}, radius, 96);
    for (const auto& s : section) c.section.push_back(parse_expression(s, {"x1", "x2"}));
    return c;
}

CycleSpec fiber_sweep_cycle() {
    CycleSpec c;
    c.description = "unit circle with full fiber sweep";
    c.parametric = true;
    const std::string arg = "6.283185307179586*t";
    c.state_of_t = {parse_expression("cos(" + arg + ")", {"t"}),
                    parse_expression("sin(" + arg + ")", {"t"})};
    c.control_of_t = {parse_expression(arg, {"t"})};
    return c;
}

LyapunovSpec round_lyapunov(std::size_t n, double level, double half) {
    std::string v = "x1^2";
    for (std::size_t i = 2; i <= n; ++i) v += " + x" + std::to_string(i) + "^2";
    return LyapunovSpec::parse(v, n, level, IntervalBox::cube(n, -half, half));
}

VectorFieldSpec inward_field(std::size_t n) {
    std::vector<std::string> comps;
    for (std::size_t i = 1; i <= n; ++i) comps.push_back("-x" + std::to_string(i));
    return VectorFieldSpec::parse(n, comps);
}

CatalogEntry make_single_integrator() {
    CatalogEntry e;
    e.name = "single_integrator_2d";
    e.description = "x' = u on the plane, point target at the origin";
    e.instance.sys = ControlSystemSpec::parse("single_integrator_2d", 2, 2,
                                              BundleKind::TrivialVector, {"u1", "u2"},
                                              IntervalBox::cube(2, -1.0, 1.0));
    e.instance.A = TargetSet::make_point({0.0, 0.0});
    e.instance.G_ref = inward_field(2);
    e.instance.lyap = round_lyapunov(2, 0.5, 1.0);
    e.instance.cycles = {section_cycle_2d("radial feedback section", {"-x1", "-x2"}, 1.0)};
    e.instance.delta = 0.5;
    e.instance.state_box = IntervalBox::cube(2, -1.0, 1.0);
    e.expected = {{"brockett", "Holds"}, {"adversary", "Holds"},  {"coron_d", "1"},
                  {"mansouri", "Holds"}, {"homology", "Holds"}};
    return e;
}

CatalogEntry make_brockett_integrator(unsigned seed) {
    CatalogEntry e;
    e.name = "brockett_integrator";
    e.description = "nonholonomic integrator (u1, u2, u1*x2 - u2*x1), point target";
    e.instance.sys = ControlSystemSpec::parse("brockett_integrator", 3, 2,
                                              BundleKind::TrivialVector,
                                              {"u1", "u2", "u1*x2 - u2*x1"},
                                              IntervalBox::cube(2, -2.0, 2.0));
    e.instance.sys.control_homogeneity = 1;  // f(x, s*u) = s f(x, u)
    e.instance.A = TargetSet::make_point({0.0, 0.0, 0.0});
    e.instance.G_ref = inward_field(3);
    e.instance.lyap = round_lyapunov(3, 0.5, 1.0);
    e.instance.cycles = random_sphere_cycles(seed, 20, 1.2);
    e.instance.state_box = IntervalBox::cube(3, -2.0, 2.0);
    e.instance.avoidance = image_avoidance_certificate(e.instance.sys, 2,
                                                       e.instance.state_box, 0.25);
    e.instance.delta = 0.1;
    e.expected = {{"brockett", "Fails"}, {"adversary", "Fails"},  {"coron_d", "0"},
                  {"mansouri", "Fails"}, {"homology", "Fails"}};
    return e;
}

CatalogEntry make_example5() {
    CatalogEntry e;
    e.name = "example5_circle_bundle";
    e.description = "circle bundle of unit-norm plane vectors, point target";
    e.instance.sys = ControlSystemSpec::parse("example5_circle_bundle", 2, 1,
                                              BundleKind::FiberSampled,
                                              {"cos(u1)", "sin(u1)"},
                                              IntervalBox(std::vector<Interval>{{0.0, 6.3}}));
    e.instance.sys.declared_fiber_norm = 1.0;
    e.instance.A = TargetSet::make_point({0.0, 0.0});
    e.instance.G_ref = inward_field(2);
    e.instance.lyap = round_lyapunov(2, 0.5, 1.0);
    e.instance.cycles = {fiber_sweep_cycle()};
    e.instance.family = AdversaryFamily::DisjointnessProbe;
    e.instance.delta = 0.9;
    e.instance.state_box = IntervalBox::cube(2, -1.0, 1.0);
    e.expected = {{"brockett", "Unknown"}, {"adversary", "Fails"}, {"coron_d", "1"},
                  {"mansouri", "Holds"},   {"homology", "Holds"}};
    return e;
}

CatalogEntry make_circle_target() {
    CatalogEntry e;
    e.name = "mansouri_circle_target";
    e.description = "x' = u with the unit circle as hypersurface target";
    e.instance.sys = ControlSystemSpec::parse("mansouri_circle_target", 2, 2,
                                              BundleKind::TrivialVector, {"u1", "u2"},
                                              IntervalBox::cube(2, -1.0, 1.0));
    e.instance.A = TargetSet::make_hypersurface(circle_polyline(1.0, 48));
    e.instance.cycles = {section_cycle_2d("radial feedback section", {"-x1", "-x2"}, 1.5)};
    e.instance.delta = 0.5;
    e.instance.state_box = IntervalBox::cube(2, -2.0, 2.0);
    e.expected = {{"brockett", "Holds"}, {"adversary", "Holds"},   {"coron_d", "1"},
                  {"mansouri", "Holds"}, {"homology", "Unknown"}};
    return e;
}

std::string format_coeff(double c) {
    std::ostringstream os;
    os << c;
    return os.str();
}

} // namespace

std::vector<CatalogEntry> catalog_list(unsigned seed) {
    return {make_single_integrator(), make_brockett_integrator(seed), make_example5(),
            make_circle_target()};
}

CatalogEntry catalog_entry(const std::string& name, unsigned seed) {
    for (auto& e : catalog_list(seed))
        if (e.name == name) return e;
    throw ConditionError("unknown catalog entry '" + name + "'");
}

std::vector<CycleSpec> random_sphere_cycles(unsigned seed, int count, double radius) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<CycleSpec> cycles;
    for (int k = 0; k < count; ++k) {
        // u1 = a0 + a1*x3 with |a0| > (radius + 0.1)|a1| keeps the section
        // bounded away from zero on the whole sphere
        double a0 = 0, a1 = 0;
        do {
            a0 = unit(rng);
            a1 = unit(rng);
        } while (std::abs(a0) <= (radius + 0.1) * std::abs(a1));
        const double b0 = unit(rng), b1 = unit(rng);
        CycleSpec c;
        c.description = "random height-modulated section #" + std::to_string(k);
        c.sphere = make_icosphere({0.0, 0.0, 0.0}, radius, 2);
        c.section = {parse_expression(format_coeff(a0) + " + " + format_coeff(a1) + "*x3",
                                      {"x1", "x2", "x3"}),
                     parse_expression(format_coeff(b0) + " + " + format_coeff(b1) + "*x3",
                                      {"x1", "x2", "x3"})};
        cycles.push_back(std::move(c));
    }
    return cycles;
}

AuditInstance random_linear_instance(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> small(1, 2);

    // unimodular B = L*U with unit diagonals and small integer off-diagonals
    const int l = (coin(rng) ? 1 : -1) * small(rng);
    const int u = (coin(rng) ? 1 : -1) * small(rng);
    const int B[2][2] = {{1, u}, {l, l * u + 1}};  // det = 1
    // inverse of B, also integer
    const int Binv[2][2] = {{l * u + 1, -u}, {-l, 1}};

    AuditInstance inst;
    std::vector<std::string> dyn;
    for (int i = 0; i < 2; ++i) {
        std::ostringstream os;
        os << B[i][0] << "*u1 + " << B[i][1] << "*u2 + 0.1*x" << i + 1;
        dyn.push_back(os.str());
    }
    inst.sys = ControlSystemSpec::parse("random_linear_" + std::to_string(seed), 2, 2,
                                        BundleKind::TrivialVector, dyn,
                                        IntervalBox::cube(2, -4.0, 4.0));
    inst.A = TargetSet::make_point({0.0, 0.0});
    inst.G_ref = inward_field(2);
    inst.lyap = round_lyapunov(2, 0.5, 1.0);

    // exact feedback section u(x) = Binv * (-1.1 x) realizes f = -x
    CycleSpec cyc;
    cyc.description = "exact inward feedback section";
    cyc.loop = make_circle_loop({0.0, 0.0}, 1.0, 96);
    for (int j = 0; j < 2; ++j) {
        std::ostringstream os;
        os << -1.1 * Binv[j][0] << "*x1 + " << -1.1 * Binv[j][1] << "*x2";
        cyc.section.push_back(parse_expression(os.str(), {"x1", "x2"}));
    }
    inst.cycles = {cyc};
    inst.delta = 0.1;
    inst.state_box = IntervalBox::cube(2, -1.0, 1.0);
    return inst;
}

} // namespace stabcheck

#include "stabcheck/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace stabcheck {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    default: return "Unknown";
    }
}

namespace {

std::string format_point(const std::vector<double>& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ")";
    return os.str();
}

// Best-first branch and bound lower bound for min of sum expr_i^2 over the
// box; only the listed dimensions are split. Sound: returns <= the true min.
double min_sq_lower(const std::vector<ExprPtr>& exprs, const std::vector<std::string>& vars,
                    const IntervalBox& start, const std::vector<std::size_t>& splittable,
                    int budget) {
    auto low_of = [&](const IntervalBox& box) {
        double low = 0;
        for (const auto& e : exprs) {
            auto r = interval_evaluate(e, box, vars);
            if (r.unbounded) return 0.0;
            low += r.value.mig() * r.value.mig();
        }
        return low;
    };
    using Node = std::pair<double, IntervalBox>;
    auto cmp = [](const Node& a, const Node& b) { return a.first > b.first; };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
    heap.push({low_of(start), start});
    for (int it = 0; it < budget && !splittable.empty(); ++it) {
        auto [low, box] = heap.top();
        if (low > 0) break;  // global lower bound already positive
        std::size_t dim = splittable[0];
        for (std::size_t i : splittable)
            if (box.dims[i].width() > box.dims[dim].width()) dim = i;
        if (box.dims[dim].width() < 1e-10) break;
        heap.pop();
        auto halves = box.split(dim);
        heap.push({low_of(halves.first), halves.first});
        heap.push({low_of(halves.second), halves.second});
    }
    return std::max(0.0, heap.top().first);
}

std::vector<std::size_t> used_dimensions(const std::vector<ExprPtr>& exprs,
                                         const std::vector<std::string>& vars) {
    std::set<std::string> used;
    for (const auto& e : exprs)
        for (const auto& v : free_variables(e)) used.insert(v);
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (used.count(vars[i])) dims.push_back(i);
    return dims;
}

// lower bound on min ||f - v||^2 over the joint box; narrowing the control
// variables alone often suffices, so try that cheap pass before splitting
// every occurring dimension
double unreachability_lower(const ControlSystemSpec& sys, const std::vector<ExprPtr>& shifted,
                            const std::vector<std::string>& vars, const IntervalBox& joint,
                            int budget) {
    const auto used = used_dimensions(shifted, vars);
    std::vector<std::size_t> controls;
    for (std::size_t i : used)
        if (i >= sys.state_dim) controls.push_back(i);
    if (!controls.empty()) {
        const double low = min_sq_lower(shifted, vars, joint, controls, budget / 4);
        if (low > 0) return low;
    }
    return min_sq_lower(shifted, vars, joint, used, budget);
}

// shifted components f_i - v_i
std::vector<ExprPtr> shifted_components(const ControlSystemSpec& sys,
                                        const std::vector<double>& v) {
    std::vector<ExprPtr> out;
    for (std::size_t i = 0; i < sys.dynamics.size(); ++i)
        out.push_back(Expr::binary(BinaryOp::Sub, sys.dynamics[i], Expr::constant(v[i])));
    return out;
}

struct SampleCloud {
    std::vector<std::vector<double>> points;   // joint (x, u) samples
    std::vector<std::vector<double>> values;   // f at each sample
};

SampleCloud sample_dynamics(const ControlSystemSpec& sys, const IntervalBox& joint,
                            const std::vector<std::string>& vars) {
    const std::size_t dims = joint.dims.size();
    int per_axis = static_cast<int>(std::floor(std::pow(30000.0, 1.0 / dims)));
    per_axis = std::clamp(per_axis, 3, 9);
    SampleCloud cloud;
    std::vector<int> idx(dims, 0);
    while (true) {
        std::vector<double> p(dims);
        for (std::size_t i = 0; i < dims; ++i)
            p[i] = joint.dims[i].lo + joint.dims[i].width() * idx[i] / (per_axis - 1);
        std::map<std::string, double> b;
        for (std::size_t i = 0; i < dims; ++i) b[vars[i]] = p[i];
        std::vector<double> f;
        for (const auto& c : sys.dynamics) f.push_back(evaluate(c, b));
        cloud.points.push_back(std::move(p));
        cloud.values.push_back(std::move(f));
        std::size_t d = 0;
        while (d < dims && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == dims) break;
    }
    return cloud;
}

// certify that f(x,u) = v has a solution: freeze surplus variables at the
// best sample and run the Krawczyk test on a well-conditioned square
// subsystem around it
bool certify_solvable(const ControlSystemSpec& sys, const IntervalBox& joint,
                      const std::vector<std::string>& vars, const std::vector<double>& v,
                      const std::vector<double>& seed) {
    const std::size_t n = sys.state_dim, total = vars.size();
    const auto shifted = shifted_components(sys, v);

    // numeric Jacobian at the seed
    std::map<std::string, double> b;
    for (std::size_t i = 0; i < total; ++i) b[vars[i]] = seed[i];
    std::vector<std::vector<double>> J(n, std::vector<double>(total));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < total; ++c)
            J[r][c] = evaluate(derivative(shifted[r], vars[c]), b);

    // greedy column selection by partial-pivoting elimination
    std::vector<std::size_t> chosen;
    std::vector<std::vector<double>> W = J;
    std::vector<bool> taken(total, false);
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t best = total;
        double mag = 1e-9;
        for (std::size_t c = 0; c < total; ++c)
            if (!taken[c] && std::abs(W[r][c]) > mag) {
                mag = std::abs(W[r][c]);
                best = c;
            }
        if (best == total) return false;  // rank-deficient at the seed
        taken[best] = true;
        chosen.push_back(best);
        for (std::size_t r2 = r + 1; r2 < n; ++r2) {
            const double factor = W[r2][best] / W[r][best];
            for (std::size_t c = 0; c < total; ++c) W[r2][c] -= factor * W[r][c];
        }
    }
    std::sort(chosen.begin(), chosen.end());

    // square subsystem in the chosen variables, frozen elsewhere
    std::map<std::string, ExprPtr> repl;
    for (std::size_t c = 0; c < total; ++c)
        if (!std::count(chosen.begin(), chosen.end(), c))
            repl[vars[c]] = Expr::constant(seed[c]);
    for (std::size_t k = 0; k < chosen.size(); ++k)
        repl[vars[chosen[k]]] = Expr::variable("x" + std::to_string(k + 1));
    std::vector<ExprPtr> square;
    for (const auto& e : shifted) square.push_back(substitute(e, repl));
    auto field = VectorFieldSpec::from_asts(square);

    for (double radius : {1e-3, 1e-2, 1e-1, 0.4}) {
        std::vector<Interval> dims;
        bool ok = true;
        for (std::size_t k = 0; k < chosen.size(); ++k) {
            const auto& bound = joint.dims[chosen[k]];
            const double lo = std::max(bound.lo, seed[chosen[k]] - radius);
            const double hi = std::min(bound.hi, seed[chosen[k]] + radius);
            if (lo >= hi) ok = false;
            dims.push_back(Interval{lo, hi});
        }
        if (ok && krawczyk_unique_zero(field, IntervalBox(dims))) return true;
    }
    return false;
}

IntervalBox joint_box(const ControlSystemSpec& sys, const IntervalBox& state_box) {
    if (state_box.dims.size() != sys.state_dim)
        throw ConditionError("state box dimension mismatch");
    std::vector<Interval> dims = state_box.dims;
    for (const auto& d : sys.control_box.dims) dims.push_back(d);
    return IntervalBox(dims);
}

} // namespace

ConditionVerdict check_brockett(const ControlSystemSpec& sys, const TargetSet& A, double delta,
                                const IntervalBox& state_box, int resolution) {
    (void)A;  // the neighborhood enters through state_box
    ConditionVerdict verdict;
    verdict.condition = "brockett";
    verdict.delta = delta;
    verdict.resolution = resolution;
    if (sys.bundle_kind != BundleKind::TrivialVector) {
        verdict.certificate = "requires a trivial bundle (f(x,u) with u = 0 admissible)";
        return verdict;
    }
    const std::size_t n = sys.state_dim;
    const auto vars = state_control_vars(n, sys.control_dim);
    const auto joint = joint_box(sys, state_box);
    const auto cloud = sample_dynamics(sys, joint, vars);

    // target grid ||v|| <= delta, 5 points per axis
    std::vector<std::vector<double>> targets;
    std::vector<int> idx(n, 0);
    while (true) {
        std::vector<double> v(n);
        double norm2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = -delta + delta * idx[i] / 2.0;
            norm2 += v[i] * v[i];
        }
        if (norm2 <= delta * delta + 1e-15) targets.push_back(v);
        std::size_t d = 0;
        while (d < n && ++idx[d] == 5) idx[d++] = 0;
        if (d == n) break;
    }

    auto sampled_min = [&](const std::vector<double>& v) {
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t s = 0; s < cloud.values.size(); ++s) {
            double d2 = 0;
            for (std::size_t i = 0; i < n; ++i)
                d2 += (cloud.values[s][i] - v[i]) * (cloud.values[s][i] - v[i]);
            if (d2 < best) {
                best = d2;
                arg = s;
            }
        }
        return std::make_pair(std::sqrt(best), arg);
    };

    std::vector<std::tuple<double, std::size_t, std::size_t>> ranked;  // dist, target, seed
    for (std::size_t t = 0; t < targets.size(); ++t) {
        auto [dist, arg] = sampled_min(targets[t]);
        ranked.emplace_back(dist, t, arg);
    }
    std::sort(ranked.rbegin(), ranked.rend());

    bool all_solved = true;
    for (const auto& [dist, t, arg] : ranked) {
        const auto& v = targets[t];
        if (dist > 1e-4) {
            // suspicious target: try to certify it unreachable outright
            const auto shifted = shifted_components(sys, v);
            const double low = unreachability_lower(sys, shifted, vars, joint, 20000);
            if (low > 0) {
                verdict.status = Verdict::Fails;
                verdict.witness_v = v;
                verdict.witness_bound = std::sqrt(low);
                verdict.certificate = "certified min ||f - v|| >= " +
                                      std::to_string(verdict.witness_bound) +
                                      " over the box for v = " + format_point(v);
                return verdict;
            }
        }
        if (!certify_solvable(sys, joint, vars, v, cloud.points[arg])) all_solved = false;
    }
    if (all_solved) {
        verdict.status = Verdict::Holds;
        verdict.certificate = "all " + std::to_string(targets.size()) +
                              " grid targets ||v|| <= " + std::to_string(delta) +
                              " certified reachable (grid-scoped)";
    } else {
        verdict.certificate = "some targets neither certified reachable nor unreachable";
    }
    return verdict;
}

bool recheck_brockett_witness(const ControlSystemSpec& sys, const IntervalBox& state_box,
                              const std::vector<double>& v, double claimed_bound) {
    const auto vars = state_control_vars(sys.state_dim, sys.control_dim);
    const auto joint = joint_box(sys, state_box);
    const auto shifted = shifted_components(sys, v);
    const double low = unreachability_lower(sys, shifted, vars, joint, 40000);
    return low > 0 && std::sqrt(low) >= 0.5 * claimed_bound;
}

ConditionVerdict check_adversary(const ControlSystemSpec& sys, const TargetSet& A, double delta,
                                 AdversaryFamily family, const IntervalBox& state_box,
                                 const std::vector<VectorFieldSpec>& user_fields,
                                 int resolution) {
    ConditionVerdict verdict;
    verdict.condition = "adversary";
    verdict.delta = delta;
    verdict.resolution = resolution;

    if (family == AdversaryFamily::Constant) {
        if (sys.bundle_kind == BundleKind::FiberSampled)
            throw ConditionError(
                "fiber-sampled systems support only the disjointness probe and user families");
        verdict = check_brockett(sys, A, delta, state_box, resolution);
        verdict.condition = "adversary";
        verdict.certificate = "constant adversary family: " + verdict.certificate;
        return verdict;
    }

    if (family == AdversaryFamily::DisjointnessProbe) {
        const double bound = fiber_min_norm(sys, state_box);
        if (bound > delta) {
            verdict.status = Verdict::Fails;
            verdict.witness_bound = bound;
            verdict.certificate =
                "fiber norm lower bound " + std::to_string(bound) + " > delta = " +
                std::to_string(delta) +
                ": every adversary with ||F|| <= delta is disjoint from the image";
        } else {
            verdict.certificate = "fiber norm lower bound " + std::to_string(bound) +
                                  " does not exceed delta";
        }
        return verdict;
    }

    // user-supplied adversary fields
    const auto vars = state_control_vars(sys.state_dim, sys.control_dim);
    const auto joint = joint_box(sys, state_box);
    const auto cloud = sample_dynamics(sys, joint, vars);
    bool all_defeated = true;
    for (std::size_t k = 0; k < user_fields.size(); ++k) {
        const auto& F = user_fields[k];
        // components f_i(x,u) - F_i(x)
        std::vector<ExprPtr> gap;
        for (std::size_t i = 0; i < sys.state_dim; ++i)
            gap.push_back(Expr::binary(BinaryOp::Sub, sys.dynamics[i], F.components[i]));

        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t s = 0; s < cloud.points.size(); ++s) {
            std::vector<double> x(cloud.points[s].begin(),
                                  cloud.points[s].begin() + sys.state_dim);
            const auto fx = F.eval(x);
            double d2 = 0;
            for (std::size_t i = 0; i < sys.state_dim; ++i)
                d2 += (cloud.values[s][i] - fx[i]) * (cloud.values[s][i] - fx[i]);
            if (d2 < best) {
                best = d2;
                arg = s;
            }
        }
        ControlSystemSpec gap_sys = sys;
        gap_sys.dynamics = gap;
        if (certify_solvable(gap_sys, joint, vars, std::vector<double>(sys.state_dim, 0.0),
                             cloud.points[arg]))
            continue;  // adversary matched somewhere: defeated

        const double low = unreachability_lower(sys, gap, vars, joint, 20000);
        if (low > 0) {
            verdict.status = Verdict::Fails;
            verdict.witness_bound = std::sqrt(low);
            verdict.certificate = "adversary field #" + std::to_string(k) +
                                  " certified disjoint from the image (gap >= " +
                                  std::to_string(verdict.witness_bound) + ")";
            return verdict;
        }
        all_defeated = false;
    }
    if (all_defeated && !user_fields.empty()) {
        verdict.status = Verdict::Holds;
        verdict.certificate = "all " + std::to_string(user_fields.size()) +
                              " supplied adversaries realized by the system (family-scoped)";
    } else {
        verdict.certificate = user_fields.empty() ? "no adversary fields supplied"
                                                  : "some adversaries unresolved";
    }
    return verdict;
}

SubgroupImage coron_image_subgroup(const ControlSystemSpec& sys,
                                   const std::vector<CycleSpec>& cycles) {
    SubgroupImage image;
    const std::size_t n = sys.state_dim;
    for (const auto& cyc : cycles) {
        DegreeResult deg;
        try {
            if (cyc.parametric) {
                if (n != 2) throw ConditionError("parametric cycles are planar only");
                std::map<std::string, ExprPtr> repl;
                for (std::size_t i = 0; i < n; ++i)
                    repl["x" + std::to_string(i + 1)] = cyc.state_of_t[i];
                for (std::size_t j = 0; j < cyc.control_of_t.size(); ++j)
                    repl["u" + std::to_string(j + 1)] = cyc.control_of_t[j];
                deg = winding_number_param(substitute(sys.dynamics[0], repl),
                                           substitute(sys.dynamics[1], repl));
            } else {
                std::map<std::string, ExprPtr> repl;
                for (std::size_t j = 0; j < cyc.section.size(); ++j)
                    repl["u" + std::to_string(j + 1)] = cyc.section[j];
                std::vector<ExprPtr> comps;
                for (const auto& c : sys.dynamics) comps.push_back(substitute(c, repl));
                auto field = VectorFieldSpec::from_asts(comps);
                if (n == 2)
                    deg = winding_number(field, cyc.loop);
                else if (n == 3)
                    deg = mapping_degree(field, cyc.sphere);
                else
                    throw ConditionError("cycles supported for n=2 and n=3 only");
            }
        } catch (const DegreeError& e) {
            throw ConditionError("cycle '" + cyc.description +
                                 "' rejected (lift leaves the nonzero image): " + e.what());
        }
        if (deg.status != CertStatus::Certified)
            throw ConditionError("cycle '" + cyc.description + "' degree not certified");
        image.add(cyc.description, deg.degree);
    }
    return image;
}

AvoidanceCertificate image_avoidance_certificate(const ControlSystemSpec& sys, int axis,
                                                 const IntervalBox& state_box, double kappa,
                                                 int levels) {
    AvoidanceCertificate cert;
    cert.axis = axis;
    cert.kappa = kappa;
    const std::size_t n = sys.state_dim, m = sys.control_dim;
    const auto vars = state_control_vars(n, m);
    if (axis < 0 || axis >= static_cast<int>(n)) {
        cert.note = "axis out of range";
        return cert;
    }

    // E = sum_perp f_i^2 - kappa^2 f_axis^2, must stay positive on every
    // control annulus shell times the state box
    ExprPtr E = Expr::constant(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ExprPtr sq = Expr::binary(BinaryOp::Mul, sys.dynamics[i], sys.dynamics[i]);
        if (static_cast<int>(i) == axis)
            E = Expr::binary(BinaryOp::Sub, E,
                             Expr::binary(BinaryOp::Mul, Expr::constant(kappa * kappa), sq));
        else
            E = Expr::binary(BinaryOp::Add, E, sq);
    }

    const auto split_dims = used_dimensions({E}, vars);
    std::function<bool(const IntervalBox&, int)> positive = [&](const IntervalBox& box,
                                                                int depth) {
        auto r = interval_evaluate(E, box, vars);
        if (!r.unbounded && r.value.lo > 0) return true;
        if (depth >= 16 || split_dims.empty()) return false;
        std::size_t dim = split_dims[0];
        for (std::size_t i : split_dims)
            if (box.dims[i].width() > box.dims[dim].width()) dim = i;
        auto halves = box.split(dim);
        return positive(halves.first, depth + 1) && positive(halves.second, depth + 1);
    };

    double scale = 0;
    for (const auto& d : sys.control_box.dims) scale = std::max(scale, d.mag());
    if (scale == 0) {
        cert.note = "degenerate control box";
        return cert;
    }
    const int shells = sys.control_homogeneity >= 1 ? 2 : levels;
    double s = scale / 2;
    for (int level = 0; level < shells; ++level, s /= 2) {
        // cover {s <= ||u||_inf <= 2s} by the 3^m grid boxes minus the core
        std::vector<int> idx(m, 0);
        while (true) {
            bool core = true;
            std::vector<Interval> dims = state_box.dims;
            for (std::size_t j = 0; j < m; ++j) {
                static const double edges[4] = {-2, -1, 1, 2};
                dims.push_back(Interval{edges[idx[j]] * s, edges[idx[j] + 1] * s});
                if (idx[j] != 1) core = false;
            }
            if (!core && !positive(IntervalBox(dims), 0)) {
                cert.note = "shell at scale " + std::to_string(s) + " not certified";
                return cert;
            }
            std::size_t j = 0;
            while (j < m && ++idx[j] == 3) idx[j++] = 0;
            if (j == m) break;
        }
    }
    cert.valid = true;
    cert.scale_floor = sys.control_homogeneity >= 1 ? 0.0 : 2 * s;
    cert.note = sys.control_homogeneity >= 1
                    ? "declared control homogeneity extends the shell bound to all scales"
                    : "certified down to control scale " + std::to_string(2 * s);
    return cert;
}

namespace {

long long applicable_chi(const TargetSet& A) {
    if (A.kind == TargetKind::Hypersurface) return bounded_domain(A).chi;
    return chi_of_target(A);
}

ConditionVerdict subgroup_verdict(std::string condition, long long chi_star,
                                  const SubgroupImage& image,
                                  const std::optional<AvoidanceCertificate>& avoidance) {
    ConditionVerdict verdict;
    verdict.condition = std::move(condition);
    const long d = image.d;
    if (avoidance && avoidance->valid && d != 0)
        throw ConditionError("inconsistent certificates: avoidance proves a trivial image "
                             "subgroup but a cycle has nonzero degree");
    if (chi_star == 0) {
        verdict.status = Verdict::Holds;
        verdict.certificate = "chi* = 0: the required subgroup is trivial";
    } else if (d != 0 && chi_star % d == 0) {
        verdict.status = Verdict::Holds;
        verdict.certificate = "d = " + std::to_string(d) + " divides chi* = " +
                              std::to_string(chi_star) + " (" +
                              std::to_string(image.cycles.size()) + " certified cycles)";
    } else if (avoidance && avoidance->valid) {
        verdict.status = Verdict::Fails;
        verdict.witness_bound = avoidance->kappa;
        verdict.certificate =
            "image avoidance certificate (axis " + std::to_string(avoidance->axis) +
            ", kappa = " + std::to_string(avoidance->kappa) +
            "): image subgroup is trivial, cannot contain chi* = " + std::to_string(chi_star);
    } else {
        verdict.certificate = "cycles generate d = " + std::to_string(d) +
                              ", no exhaustiveness argument for chi* = " +
                              std::to_string(chi_star);
    }
    return verdict;
}

} // namespace

ConditionVerdict check_mansouri(const ControlSystemSpec& sys, const TargetSet& A,
                                const std::vector<CycleSpec>& cycles,
                                const std::optional<AvoidanceCertificate>& avoidance) {
    const long long chi_star = applicable_chi(A);
    const auto image = coron_image_subgroup(sys, cycles);
    return subgroup_verdict("mansouri", chi_star, image, avoidance);
}

ConditionVerdict check_homology_euclidean(const ControlSystemSpec& sys, const TargetSet& A,
                                          const VectorFieldSpec& G_ref, const LyapunovSpec& lyap,
                                          const std::vector<CycleSpec>& cycles,
                                          const std::optional<AvoidanceCertificate>& avoidance,
                                          int resolution) {
    const std::size_t n = sys.state_dim;
    if (n != 2 && n != 3)
        throw ConditionError("homology check supports n = 2 and n = 3 only");

    // validate the reference field with the supplied Lyapunov evidence
    if (!verify_lyapunov(lyap, G_ref, -1.0, resolution).certified)
        throw ConditionError("reference field not validated: Lyapunov decrease not certified");
    const auto boundary = extract_sublevel_boundary(lyap, std::max(resolution, 24));
    if (!inward_decrease(lyap, G_ref, boundary).certified)
        throw ConditionError("reference field not validated: not certified inward on the "
                             "sublevel boundary");

    const long long chi_star = applicable_chi(A);

    // cross-check: deg(G_ref on dS) must reproduce chi* when A is a point or
    // a low-dimensional compactum (then chi(S) = chi(A))
    if (A.kind != TargetKind::Hypersurface) {
        long deg_sum = 0;
        if (n == 2) {
            for (const auto& loop : boundary.loops) {
                auto r = winding_number(G_ref, loop);
                if (r.status != CertStatus::Certified)
                    throw ConditionError("boundary degree of the reference field not certified");
                deg_sum += r.degree;
            }
        } else {
            auto r = mapping_degree(G_ref, boundary.mesh);
            if (r.status != CertStatus::Certified)
                throw ConditionError("boundary degree of the reference field not certified");
            deg_sum = r.degree;
        }
        // inward fields give deg = chi(S) in even dimension, -chi(S) in odd
        const long long expected = (n % 2 == 0) ? chi_star : -chi_star;
        if (deg_sum != expected)
            throw ConditionError("degree cross-check failed: deg(G_ref on dS) = " +
                                 std::to_string(deg_sum) + " but chi* = " +
                                 std::to_string(chi_star));
    }

    const auto image = coron_image_subgroup(sys, cycles);
    auto verdict = subgroup_verdict("homology", chi_star, image, avoidance);
    verdict.resolution = resolution;
    return verdict;
}

AuditReport audit_implications(const std::vector<AuditInstance>& instances) {
    AuditReport report;
    for (const auto& inst : instances) {
        AuditRecord rec;
        rec.name = inst.sys.name;

        const long long chi_star = applicable_chi(inst.A);
        rec.gate_applicable = inst.sys.bundle_kind != BundleKind::FiberSampled &&
                              inst.sys.orientable_state && chi_star != 0;

        if (inst.sys.bundle_kind == BundleKind::TrivialVector) {
            rec.brockett = check_brockett(inst.sys, inst.A, inst.delta, inst.state_box,
                                          inst.resolution);
        } else {
            rec.brockett.condition = "brockett";
            rec.brockett.certificate = "not a trivial bundle";
        }

        rec.adversary = check_adversary(inst.sys, inst.A, inst.delta, inst.family,
                                        inst.state_box, {}, inst.resolution);

        try {
            rec.coron_d = coron_image_subgroup(inst.sys, inst.cycles).d;
        } catch (const ConditionError&) {
            rec.coron_d = 0;
        }

        try {
            rec.mansouri = check_mansouri(inst.sys, inst.A, inst.cycles, inst.avoidance);
        } catch (const ConditionError& e) {
            rec.mansouri.condition = "mansouri";
            rec.mansouri.certificate = e.what();
        }

        if (inst.G_ref && inst.lyap) {
            try {
                rec.homology = check_homology_euclidean(inst.sys, inst.A, *inst.G_ref,
                                                        *inst.lyap, inst.cycles, inst.avoidance,
                                                        inst.resolution);
            } catch (const ConditionError& e) {
                rec.homology.condition = "homology";
                rec.homology.certificate = e.what();
            }
        } else {
            rec.homology.condition = "homology";
            rec.homology.certificate = "no reference field / Lyapunov evidence supplied";
        }

        const bool hc_holds = rec.homology.status == Verdict::Holds;
        const bool ac_fails = rec.adversary.status == Verdict::Fails;
        if (rec.gate_applicable && hc_holds && ac_fails)
            report.contradictions.push_back(
                rec.name + ": homology Holds with adversary Fails on a vector bundle with "
                           "chi != 0 (forbidden by the implication theorem)");
        if (inst.sys.bundle_kind == BundleKind::FiberSampled && hc_holds && ac_fails)
            report.independence_witnesses.push_back(
                rec.name + ": homology Holds, adversary Fails (fiber bundle outside the "
                           "vector-bundle gate)");
        if (rec.coron_d == 1 && rec.brockett.status == Verdict::Fails)
            report.contradictions.push_back(
                rec.name + ": surjective image subgroup (d=1) with Brockett certified Fails");

        for (const auto* v : {&rec.brockett, &rec.adversary, &rec.mansouri, &rec.homology})
            if (v->status == Verdict::Unknown && !v->condition.empty())
                report.inconclusive.push_back(rec.name + "/" + v->condition + ": " +
                                              v->certificate);
        report.records.push_back(std::move(rec));
    }
    return report;
}

} // namespace stabcheck

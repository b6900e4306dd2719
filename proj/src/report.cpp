#include "stabcheck/report.hpp"

#include <chrono>
#include <set>
#include <sstream>

namespace stabcheck {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

IntervalBox box_from_json(const Json& j, const std::string& path, std::size_t expect_dims) {
    if (!j.is_array() || j.size() != expect_dims)
        throw ReportError(path + ": expected " + std::to_string(expect_dims) +
                          " [lo, hi] pairs");
    std::vector<Interval> dims;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number() || double(pair[0]) >= double(pair[1]))
            throw ReportError(path + ": each entry must be [lo, hi] with lo < hi");
        dims.push_back(Interval{pair[0], pair[1]});
    }
    return IntervalBox(dims);
}

Json box_to_json(const IntervalBox& box) {
    Json j = Json::array();
    for (const auto& d : box.dims) j.push_back(Json::array({d.lo, d.hi}));
    return j;
}

AuditInstance instance_from_spec(const Json& spec) {
    for (const char* key : {"name", "state_dim", "control_dim", "dynamics", "control_box",
                            "state_box", "target_point"})
        if (!spec.contains(key)) throw ReportError(std::string("system_spec.") + key +
                                                   ": missing required field");
    const std::size_t n = spec["state_dim"];
    const std::size_t m = spec["control_dim"];
    if (n == 0 || m == 0) throw ReportError("system_spec: dimensions must be positive");

    BundleKind kind = BundleKind::TrivialVector;
    if (spec.contains("bundle_kind")) {
        const std::string k = spec["bundle_kind"];
        if (k == "trivial_vector")
            kind = BundleKind::TrivialVector;
        else if (k == "vector_bundle")
            kind = BundleKind::VectorBundleDeclared;
        else if (k == "fiber_sampled")
            kind = BundleKind::FiberSampled;
        else
            throw ReportError("system_spec.bundle_kind: unknown kind '" + k + "'");
    }

    if (!spec["dynamics"].is_array() || spec["dynamics"].size() != n)
        throw ReportError("system_spec.dynamics: expected " + std::to_string(n) +
                          " expression components, got " +
                          std::to_string(spec["dynamics"].size()));
    std::vector<std::string> dyn;
    for (const auto& d : spec["dynamics"]) dyn.push_back(d);

    AuditInstance inst;
    try {
        inst.sys = ControlSystemSpec::parse(spec["name"], n, m, kind, dyn,
                                            box_from_json(spec["control_box"],
                                                          "system_spec.control_box", m));
    } catch (const std::runtime_error& e) {
        throw ReportError(std::string("system_spec: ") + e.what());
    }
    if (spec.contains("declared_fiber_norm"))
        inst.sys.declared_fiber_norm = spec["declared_fiber_norm"];
    if (spec.contains("control_homogeneity"))
        inst.sys.control_homogeneity = spec["control_homogeneity"];

    inst.state_box = box_from_json(spec["state_box"], "system_spec.state_box", n);
    const auto& tp = spec["target_point"];
    if (!tp.is_array() || tp.size() != n)
        throw ReportError("system_spec.target_point: expected " + std::to_string(n) +
                          " coordinates");
    inst.A = TargetSet::make_point(std::vector<double>(tp.begin(), tp.end()));
    if (kind == BundleKind::FiberSampled) inst.family = AdversaryFamily::DisjointnessProbe;
    return inst;
}

AuditInstance resolve_instance(const RunConfig& config) {
    AuditInstance inst;
    if (!config.system_spec.is_null())
        inst = instance_from_spec(config.system_spec);
    else if (!config.system.empty())
        try {
            inst = catalog_entry(config.system, config.seed).instance;
        } catch (const ConditionError& e) {
            throw ReportError(e.what());
        }
    else
        throw ReportError("check requires --system or an inline system_spec block");
    if (config.delta > 0) inst.delta = config.delta;
    if (config.level > 0 && inst.lyap) inst.lyap->level = config.level;
    inst.resolution = config.resolution;
    return inst;
}

Json verdict_record(const std::string& condition, const ConditionVerdict& v,
                    const AuditInstance& inst, double elapsed_ms) {
    Json rec;
    rec["condition"] = condition;
    rec["status"] = to_string(v.status);
    rec["certificate"] = v.certificate;
    rec["delta"] = v.delta;
    rec["resolution"] = v.resolution;
    if (v.status == Verdict::Fails) {
        Json w;
        w["system"] = inst.sys.name;
        if (!v.witness_v.empty()) {
            w["type"] = "unreachable_target";
            w["v"] = v.witness_v;
            w["bound"] = v.witness_bound;
            w["state_box"] = box_to_json(inst.state_box);
        } else if (condition == "adversary") {
            w["type"] = "fiber_disjointness";
            w["fiber_bound"] = v.witness_bound;
            w["delta"] = v.delta;
        } else if (inst.avoidance && inst.avoidance->valid) {
            w["type"] = "image_avoidance";
            w["axis"] = inst.avoidance->axis;
            w["kappa"] = inst.avoidance->kappa;
        }
        rec["witness"] = w;
    }
    rec["timing_ms"] = elapsed_ms;
    return rec;
}

const std::set<std::string> kKnownConditions = {"brockett", "adversary", "coron", "mansouri",
                                                "homology"};

std::vector<std::string> applicable_conditions(const AuditInstance& inst) {
    std::vector<std::string> out;
    if (inst.sys.bundle_kind == BundleKind::TrivialVector) out.push_back("brockett");
    out.push_back("adversary");
    out.push_back("coron");
    out.push_back("mansouri");
    if (inst.G_ref && inst.lyap) out.push_back("homology");
    return out;
}

Json run_one(const std::string& condition, const AuditInstance& inst) {
    const auto t0 = std::chrono::steady_clock::now();
    if (condition == "brockett") {
        if (inst.sys.bundle_kind != BundleKind::TrivialVector)
            throw ReportError("brockett requires a trivial-bundle system");
        auto v = check_brockett(inst.sys, inst.A, inst.delta, inst.state_box, inst.resolution);
        return verdict_record(condition, v, inst, ms_since(t0));
    }
    if (condition == "adversary") {
        auto v = check_adversary(inst.sys, inst.A, inst.delta, inst.family, inst.state_box, {},
                                 inst.resolution);
        return verdict_record(condition, v, inst, ms_since(t0));
    }
    if (condition == "coron") {
        auto image = coron_image_subgroup(inst.sys, inst.cycles);
        Json rec;
        rec["condition"] = condition;
        rec["d"] = image.d;
        Json cyc = Json::array();
        for (const auto& [desc, deg] : image.cycles)
            cyc.push_back(Json{{"cycle", desc}, {"degree", deg}});
        rec["cycles"] = cyc;
        rec["timing_ms"] = ms_since(t0);
        return rec;
    }
    if (condition == "mansouri") {
        auto v = check_mansouri(inst.sys, inst.A, inst.cycles, inst.avoidance);
        return verdict_record(condition, v, inst, ms_since(t0));
    }
    if (condition == "homology") {
        if (!inst.G_ref || !inst.lyap)
            throw ReportError("homology requires a validated reference field and Lyapunov "
                              "evidence, which this instance does not carry");
        auto v = check_homology_euclidean(inst.sys, inst.A, *inst.G_ref, *inst.lyap,
                                          inst.cycles, inst.avoidance, inst.resolution);
        return verdict_record(condition, v, inst, ms_since(t0));
    }
    throw ReportError("unknown condition '" + condition + "'");
}

Json audit_to_json(const AuditReport& report, const std::vector<AuditInstance>& instances) {
    Json out;
    Json records = Json::array();
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const auto& r = report.records[i];
        Json rec;
        rec["system"] = r.name;
        rec["gate_applicable"] = r.gate_applicable;
        rec["coron_d"] = r.coron_d;
        rec["brockett"] = verdict_record("brockett", r.brockett, instances[i], 0.0);
        rec["adversary"] = verdict_record("adversary", r.adversary, instances[i], 0.0);
        rec["mansouri"] = verdict_record("mansouri", r.mansouri, instances[i], 0.0);
        rec["homology"] = verdict_record("homology", r.homology, instances[i], 0.0);
        for (auto* key : {"brockett", "adversary", "mansouri", "homology"})
            rec[key].erase("timing_ms");
        records.push_back(rec);
    }
    out["records"] = records;
    out["contradictions"] = report.contradictions;
    out["independence_witnesses"] = report.independence_witnesses;
    out["inconclusive"] = report.inconclusive;
    return out;
}

} // namespace

RunConfig RunConfig::from_json(const Json& j) {
    if (!j.is_object()) throw ReportError("config: expected an object");
    if (!j.contains("format") || j["format"] != kConfigFormat)
        throw ReportError("config.format: expected '" + std::string(kConfigFormat) + "'");
    RunConfig c;
    if (j.contains("command")) c.command = j["command"];
    if (c.command != "check" && c.command != "audit" && c.command != "recheck")
        throw ReportError("config.command: unknown command '" + c.command + "'");
    if (j.contains("system")) c.system = j["system"];
    if (j.contains("system_spec")) c.system_spec = j["system_spec"];
    if (j.contains("conditions")) {
        for (const auto& cond : j["conditions"]) {
            const std::string name = cond;
            if (!kKnownConditions.count(name))
                throw ReportError("config.conditions: unknown condition '" + name + "'");
            c.conditions.push_back(name);
        }
    }
    if (j.contains("delta")) c.delta = j["delta"];
    if (j.contains("level")) c.level = j["level"];
    if (j.contains("resolution")) c.resolution = j["resolution"];
    if (c.resolution < 4 || c.resolution > 512)
        throw ReportError("config.resolution: must be between 4 and 512");
    if (j.contains("seed")) c.seed = j["seed"];
    if (j.contains("prior_report")) c.prior_report = j["prior_report"];
    return c;
}

Json RunConfig::to_json() const {
    Json j;
    j["format"] = kConfigFormat;
    j["command"] = command;
    if (!system.empty()) j["system"] = system;
    if (!system_spec.is_null()) j["system_spec"] = system_spec;
    if (!conditions.empty()) j["conditions"] = conditions;
    if (delta > 0) j["delta"] = delta;
    if (level > 0) j["level"] = level;
    j["resolution"] = resolution;
    j["seed"] = seed;
    return j;
}

ReportDocument execute(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ReportDocument report;
    report.doc["format"] = kReportFormat;
    report.doc["version"] = kToolkitVersion;
    report.doc["config"] = config.to_json();

    if (config.command == "check") {
        auto inst = resolve_instance(config);
        auto conditions = config.conditions;
        if (conditions.empty()) conditions = applicable_conditions(inst);
        Json records = Json::array();
        for (const auto& cond : conditions) records.push_back(run_one(cond, inst));
        report.doc["system"] = inst.sys.name;
        report.doc["records"] = records;
    } else if (config.command == "audit") {
        std::vector<AuditInstance> instances;
        if (!config.system.empty() || !config.system_spec.is_null()) {
            instances.push_back(resolve_instance(config));
        } else {
            for (auto& e : catalog_list(config.seed)) {
                auto inst = e.instance;
                if (config.delta > 0) inst.delta = config.delta;
                inst.resolution = config.resolution;
                instances.push_back(std::move(inst));
            }
        }
        report.doc["audit"] = audit_to_json(audit_implications(instances), instances);
    } else if (config.command == "recheck") {
        if (config.prior_report.is_null())
            throw ReportError("recheck requires a prior report document");
        std::string failure;
        const bool ok = recheck_report(config.prior_report, &failure);
        report.doc["recheck"] = Json{{"ok", ok}, {"failure", failure}};
    } else {
        throw ReportError("unknown command '" + config.command + "'");
    }
    report.doc["total_ms"] = ms_since(t0);
    return report;
}

namespace {

void collect_witnesses(const Json& node, std::vector<Json>* out) {
    if (node.is_object()) {
        if (node.contains("status") && node["status"] == "Fails" && node.contains("witness"))
            out->push_back(node["witness"]);
        for (const auto& [key, value] : node.items()) {
            (void)key;
            collect_witnesses(value, out);
        }
    } else if (node.is_array()) {
        for (const auto& value : node) collect_witnesses(value, out);
    }
}

bool verify_witness(const Json& w, std::string* failure) {
    auto fail = [&](const std::string& why) {
        if (failure) *failure = why + " (witness: " + w.dump() + ")";
        return false;
    };
    if (!w.contains("system") || !w.contains("type")) return fail("incomplete witness");
    CatalogEntry entry;
    try {
        entry = catalog_entry(w["system"]);
    } catch (const ConditionError& e) {
        return fail(e.what());
    }
    const auto& inst = entry.instance;
    const std::string type = w["type"];
    if (type == "unreachable_target") {
        const std::vector<double> v(w["v"].begin(), w["v"].end());
        const auto box = box_from_json(w["state_box"], "witness.state_box", inst.sys.state_dim);
        if (!recheck_brockett_witness(inst.sys, box, v, w["bound"]))
            return fail("unreachable-target witness no longer certifies");
        return true;
    }
    if (type == "fiber_disjointness") {
        const double bound = fiber_min_norm(inst.sys, inst.state_box);
        if (!(bound > double(w["delta"])))
            return fail("fiber disjointness bound no longer exceeds delta");
        return true;
    }
    if (type == "image_avoidance") {
        auto cert = image_avoidance_certificate(inst.sys, w["axis"], inst.state_box, w["kappa"]);
        if (!cert.valid) return fail("avoidance certificate no longer verifies");
        const long long chi = inst.A.kind == TargetKind::Hypersurface
                                  ? bounded_domain(inst.A).chi
                                  : chi_of_target(inst.A);
        if (chi == 0) return fail("avoidance witness with chi* = 0 proves nothing");
        return true;
    }
    return fail("unknown witness type '" + type + "'");
}

} // namespace

bool recheck_report(const Json& report, std::string* failure) {
    std::vector<Json> witnesses;
    collect_witnesses(report, &witnesses);
    if (witnesses.empty()) {
        if (failure) *failure = "report carries no Fails witnesses";
        return true;
    }
    for (const auto& w : witnesses)
        if (!verify_witness(w, failure)) return false;
    return true;
}

std::string ReportDocument::render_text() const {
    std::ostringstream os;
    os << "stabcheck report (format " << doc.value("format", "?") << ", version "
       << doc.value("version", "?") << ")\n";
    auto render_record = [&](const Json& rec, const std::string& indent) {
        if (rec.contains("d")) {
            os << indent << "coron: d = " << rec["d"] << " from " << rec["cycles"].size()
               << " cycles\n";
            return;
        }
        os << indent << rec["condition"].get<std::string>() << ": "
           << rec["status"].get<std::string>() << " — " << rec["certificate"].get<std::string>()
           << "\n";
    };
    if (doc.contains("records")) {
        os << "system: " << doc["system"].get<std::string>() << "\n";
        for (const auto& rec : doc["records"]) render_record(rec, "  ");
    }
    if (doc.contains("audit")) {
        const auto& audit = doc["audit"];
        for (const auto& rec : audit["records"]) {
            os << "system: " << rec["system"].get<std::string>() << " (coron d = "
               << rec["coron_d"] << ")\n";
            for (auto* key : {"brockett", "adversary", "mansouri", "homology"})
                render_record(rec[key], "  ");
        }
        os << "contradictions: " << audit["contradictions"].size() << "\n";
        for (const auto& c : audit["contradictions"]) os << "  !! " << c.get<std::string>() << "\n";
        os << "independence witnesses: " << audit["independence_witnesses"].size() << "\n";
        for (const auto& c : audit["independence_witnesses"])
            os << "  ** " << c.get<std::string>() << "\n";
    }
    if (doc.contains("recheck")) {
        os << "recheck: " << (doc["recheck"]["ok"].get<bool>() ? "all witnesses verified"
                                                               : "FAILED")
           << "\n";
        if (!doc["recheck"]["ok"].get<bool>())
            os << "  " << doc["recheck"]["failure"].get<std::string>() << "\n";
    }
    return os.str();
}

} // namespace stabcheck

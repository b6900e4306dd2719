#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "stabcheck/report.hpp"

namespace {

using stabcheck::Json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDecertified = 3;

void emit(const stabcheck::ReportDocument& report, const std::string& output, bool as_text) {
    const std::string payload = as_text ? report.render_text() : report.doc.dump(2) + "\n";
    if (output.empty() || output == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream f(output);
    if (!f) throw stabcheck::ReportError("cannot open output file: " + output);
    f << payload;
}

Json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw stabcheck::ReportError("cannot open file: " + path);
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw stabcheck::ReportError(path + ": " + e.what());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"stabcheck: topological necessary-condition checks for feedback stabilization"};
    app.require_subcommand(1);

    std::string system, output, config_path, report_path, mesh_path;
    std::vector<std::string> conditions;
    double delta = -1.0, level = -1.0;
    int resolution = 32;
    unsigned seed = 1;
    bool as_text = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--output", output, "output file (default: stdout)");
        cmd->add_flag("--text", as_text, "render human-readable text instead of the report tree");
    };

    auto* check = app.add_subcommand("check", "run condition checkers on one system");
    check->add_option("--system", system, "built-in catalog entry name");
    check->add_option("--config", config_path, "full run configuration file");
    check->add_option("--condition", conditions,
                      "checker selection: brockett, adversary, coron, mansouri, homology");
    check->add_option("--delta", delta, "perturbation budget");
    check->add_option("--level", level, "Lyapunov sublevel threshold");
    check->add_option("--resolution", resolution, "grid resolution per axis");
    check->add_option("--seed", seed, "seed for randomized cycles");
    add_common(check);

    auto* audit = app.add_subcommand("audit", "cross-check theorem implications on instances");
    audit->add_option("--system", system, "restrict to one catalog entry");
    audit->add_option("--delta", delta, "perturbation budget");
    audit->add_option("--resolution", resolution, "grid resolution per axis");
    audit->add_option("--seed", seed, "seed for randomized cycles");
    add_common(audit);

    auto* recheck = app.add_subcommand("recheck", "independently re-verify report witnesses");
    recheck->add_option("report", report_path, "previously produced report file")->required();
    add_common(recheck);

    auto* catalog = app.add_subcommand("catalog", "list built-in instances");
    add_common(catalog);

    auto* mesh_info = app.add_subcommand("mesh-info", "homology profile of a mesh file");
    mesh_info->add_option("mesh", mesh_path, "mesh file (counts header + vertices + simplices)")
        ->required();
    add_common(mesh_info);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (catalog->parsed()) {
        stabcheck::ReportDocument report;
        report.doc["format"] = stabcheck::kReportFormat;
        report.doc["version"] = stabcheck::kToolkitVersion;
        Json entries = Json::array();
        for (const auto& e : stabcheck::catalog_list(seed)) {
            Json j;
            j["name"] = e.name;
            j["description"] = e.description;
            j["expected"] = e.expected;
            entries.push_back(j);
        }
        report.doc["catalog"] = entries;
        if (as_text) {
            std::string text;
            for (const auto& e : report.doc["catalog"]) {
                text += e["name"].get<std::string>() + ": " +
                        e["description"].get<std::string>() + "\n";
                for (const auto& [k, v] : e["expected"].items())
                    text += "  expected " + k + " = " + v.get<std::string>() + "\n";
            }
            report.doc.clear();
            std::cout << text;
            if (!output.empty() && output != "-") {
                std::ofstream f(output);
                f << text;
            }
            return kExitOk;
        }
        emit(report, output, false);
        return kExitOk;
    }

    if (mesh_info->parsed()) {
        if (!std::ifstream(mesh_path))
            throw stabcheck::ReportError("cannot open mesh file: " + mesh_path);
        const auto K = stabcheck::read_mesh_file(mesh_path);
        const auto profile = stabcheck::homology_profile(K);
        stabcheck::ReportDocument report;
        report.doc["format"] = stabcheck::kReportFormat;
        report.doc["version"] = stabcheck::kToolkitVersion;
        Json j;
        j["file"] = mesh_path;
        j["dimension"] = K.dimension();
        j["euler"] = profile.euler;
        j["betti"] = profile.betti;
        Json torsion = Json::array();
        for (const auto& degree : profile.torsion) {
            Json t = Json::array();
            for (const auto& q : degree) t.push_back(q.str());
            torsion.push_back(t);
        }
        j["torsion"] = torsion;
        report.doc["mesh"] = j;
        if (as_text) {
            std::cout << "mesh " << mesh_path << ": euler " << profile.euler << ", betti [";
            for (std::size_t i = 0; i < profile.betti.size(); ++i)
                std::cout << (i ? " " : "") << profile.betti[i];
            std::cout << "]\n";
            return kExitOk;
        }
        emit(report, output, false);
        return kExitOk;
    }

    stabcheck::RunConfig config;
    if (!config_path.empty()) {
        config = stabcheck::RunConfig::from_json(load_json(config_path));
    } else {
        config.system = system;
        config.conditions = conditions;
        config.delta = delta;
        config.level = level;
        config.resolution = resolution;
        config.seed = seed;
    }
    if (check->parsed()) config.command = "check";
    if (audit->parsed()) config.command = "audit";
    if (recheck->parsed()) {
        config.command = "recheck";
        config.prior_report = load_json(report_path);
    }

    auto report = stabcheck::execute(config);
    emit(report, output, as_text);
    if (config.command == "recheck" && !report.doc["recheck"]["ok"].get<bool>())
        return kExitDecertified;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const stabcheck::ReportError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "decertified: " << e.what() << "\n";
        return kExitDecertified;
    }
}

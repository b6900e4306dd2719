#ifndef STABCHECK_REPORT_HPP
#define STABCHECK_REPORT_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "stabcheck/catalog.hpp"

namespace stabcheck {

/// Configuration problem: bad schema, unknown names, inconsistent blocks.
/// Maps to process exit code 2.
struct ReportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr const char* kConfigFormat = "stabcheck-config-v1";
inline constexpr const char* kReportFormat = "stabcheck-report-v1";

/// One run request: a verb, an instance (catalog name or inline spec), the
/// checker selection, and numeric parameters.
struct RunConfig {
    std::string command = "check";        // check | audit | recheck
    std::string system;                   // catalog name; empty = whole catalog (audit)
    Json system_spec;                     // optional inline system block
    std::vector<std::string> conditions;  // empty = all applicable checkers
    double delta = -1.0;                  // < 0: instance default
    double level = -1.0;                  // < 0: instance default sublevel threshold
    int resolution = 32;
    unsigned seed = 1;
    Json prior_report;                    // recheck input document

    static RunConfig from_json(const Json& j);
    Json to_json() const;
};

struct ReportDocument {
    Json doc;
    std::string render_text() const;
};

/// Runs the configured command. Deterministic for a fixed config and seed
/// except for the *_ms timing fields. Throws ReportError on configuration
/// problems; checker-level exceptions propagate (internal decertification).
ReportDocument execute(const RunConfig& config);

/// Independently re-verifies every Fails witness embedded in a report
/// document. Returns false (with a message) on the first witness that no
/// longer certifies.
bool recheck_report(const Json& report, std::string* failure = nullptr);

} // namespace stabcheck

#endif

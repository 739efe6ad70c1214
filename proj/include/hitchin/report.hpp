#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace hitchin {

// Outcome of one verification pass.  Every check fills the same shape so the
// CLI can emit one uniform JSON document: identifying fields, a verdict, the
// empirically recorded constants (signs, measured coefficients), and -- on
// failure -- human-readable lines plus a machine-replayable counterexample.
struct CheckReport {
    std::string check;  // e.g. "lagrange.involution", "reduction.admissibility"
    int genus = 0;      // 0 when the check is not genus-specific
    int n = 0;          // node count for interpolation checks, 0 otherwise
    int trials = 0;
    unsigned long seed = 0;
    bool pass = true;
    std::map<std::string, std::string> recorded;  // named constants found during the run
    std::vector<std::string> failures;            // one line per failed identity
    nlohmann::ordered_json counterexample;        // replayable data for the first failure

    void fail(std::string line) {
        pass = false;
        failures.push_back(std::move(line));
    }
};

inline nlohmann::ordered_json report_json(const CheckReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["check"] = r.check;
    if (r.genus > 0) j["genus"] = r.genus;
    if (r.n > 0) j["n"] = r.n;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["verdict"] = r.pass ? "pass" : "fail";
    // Calibrated sign constants are first-class report fields.
    for (const char* key : {"sigma", "sigma_H"})
        if (const auto it = r.recorded.find(key); it != r.recorded.end()) j[key] = it->second;
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    for (const auto& [key, value] : r.recorded) rec[key] = value;
    j["recorded"] = rec;
    j["failures"] = r.failures;
    if (!r.counterexample.is_null()) j["counterexample"] = r.counterexample;
    return j;
}

} // namespace hitchin

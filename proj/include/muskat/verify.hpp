#pragma once

#include <string>
#include <vector>

// Self-checking harness: each module registers a handful of fast numerical
// checks (operator oracles, order fits, conservation laws) with pinned
// bounds. The suite is deterministic, single threaded, and sized to finish
// well inside ten minutes on one core.

namespace muskat {

struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string comparison = "<=";  // measured <= bound or measured >= bound
    std::string note;
    double seconds = 0.0;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass = false;
    double seconds = 0.0;
};

// Legal selection tokens (module names plus "all").
std::vector<std::string> verify_modules();

// Runs the checks for the selected modules; empty selection means all.
// Unknown tokens raise ConfigError before anything runs.
VerifyReport verify_suite(const std::vector<std::string>& selection);

std::string report_json(const VerifyReport& report);
std::string report_table(const VerifyReport& report);

}  // namespace muskat

#pragma once

#include <string>
#include <vector>

#include "edgehealth/cli/config.hpp"

namespace edgehealth::cli {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // counts behind the verdict
};

/// Runs the property suite at the scale given in `config.verify`.
std::vector<CheckResult> run_verify(const AppConfig& config);
/// One "PASS name: detail" or "FAIL name: detail" line per check.
std::string format_report(const std::vector<CheckResult>& checks);

}  // namespace edgehealth::cli

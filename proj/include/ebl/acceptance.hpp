#pragma once

// The acceptance criteria and the cross-module invariant suite, shared by the
// acceptance binary and the CLI `check` command.

#include <string>
#include <vector>

namespace ebl {

struct CheckResult {
    std::string id;   // "1".."12" for acceptance criteria, a short slug otherwise
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0; // 0 means no runtime limit
};

std::vector<CheckResult> run_acceptance();
std::vector<CheckResult> run_invariants();

// "PASS [id] name: detail (t s)"
std::string format_check(const CheckResult& r);

} // namespace ebl

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

#include "ebl/acceptance.hpp"

#include <cstdio>

int main() {
    int failed = 0;
    for (const auto& r : ebl::run_acceptance()) {
        std::printf("%s\n", ebl::format_check(r).c_str());
        std::fflush(stdout);
        if (!r.passed) ++failed;
    }
    return failed == 0 ? 0 : 1;
}

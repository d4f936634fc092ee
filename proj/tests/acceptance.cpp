// One line per reproduction criterion; exits nonzero if any fails.

#include <cstdio>

#include "kcbs/repro.hpp"

int main() {
    int failed = 0;
    for (int id = 1; id <= kcbs::repro::kCriterionCount; ++id) {
        const auto r = kcbs::repro::run_criterion(id);
        std::printf("criterion %2d %s  %s (%.2fs): %s\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    }
    std::printf("%d of %d criteria passed\n", kcbs::repro::kCriterionCount - failed, kcbs::repro::kCriterionCount);
    return failed == 0 ? 0 : 1;
}

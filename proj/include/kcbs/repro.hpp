#pragma once

// Reproduction checks: numbered criteria covering the headline results, and
// randomized property suites for every module.

#include <string>
#include <vector>

namespace kcbs::repro {

struct CriterionResult {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

inline constexpr int kCriterionCount = 11;

/// Runs criterion id (1-based). Never throws; an exception is a failed criterion.
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_all();

struct PropertyResult {
    std::string module;
    std::string name;
    int cases = 0;
    int failures = 0;
    std::string first_failure;
};

/// Every module property, each over `cases` random inputs (fewer only where a
/// property is a fixed regression check).
std::vector<PropertyResult> run_property_suites(int cases, unsigned long long seed = 20240611);

}  // namespace kcbs::repro

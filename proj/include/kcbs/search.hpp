#pragma once

#include <cstdint>
#include <vector>

#include "kcbs/pentagram.hpp"

namespace kcbs::search {

struct SearchConfig {
    int restarts = 16;
    int max_iterations = 4000;
    std::uint64_t seed = 1;
    double tol = 1e-13;
    /// Edge length of the initial simplex, radians.
    double initial_step = 0.4;
    /// Number of re-launches from the incumbent with a shrinking simplex.
    int jitter_rounds = 3;
};

struct RestartSummary {
    int restart;
    double k;
    int evaluations;
};

struct SearchResult {
    Pentagram pentagram;
    double k;
    double violation;  // k - 2
    std::vector<RestartSummary> trace;
};

struct ScanRow {
    double c;
    double k;
    bool violated;
};

/// Margin above 2 required before a scan row is reported as violated.
inline constexpr double kViolationMargin = 1e-9;

/// Maximizes kcbs_sum over all real pentagrams by multistart Nelder-Mead in
/// the chain chart, gauge-fixed to the state's canonical frame.
SearchResult optimize_pentagram(const SpinState& psi, const SearchConfig& cfg);

/// Best K over regular pentagrams for the canonical state with angle phi:
/// sqrt5 cos^2 phi + (5/2)(1 - 1/sqrt5) sin^2 phi, attained with axis along m.
double regular_K(double phi);

/// optimize_pentagram on the canonical state with cos(2 phi) = c, per c.
std::vector<ScanRow> detection_scan(const std::vector<double>& c_values, const SearchConfig& cfg);

/// Concurrence grid used by the scan regression: 0, 0.1, ..., 1.
inline std::vector<double> default_scan_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
}

/// Throws InvalidInput unless restarts >= 1, tol > 0, iterations >= 1.
void validate(const SearchConfig& cfg);

}  // namespace kcbs::search

#pragma once

// Single-mode biphoton as a spin-1 system. Directions live in Stokes space
// (S1, S2, S3); a neutrally polarized biphoton (|PQ> + |QP>)/sqrt2 with P, Q
// at antipodal points +-p of the Poincare sphere is the real state vector p.

#include <cstdint>
#include <vector>

#include "kcbs/spin.hpp"

namespace kcbs::biphoton {

/// Point of the Poincare sphere.
using StokesDirection = Direction;

struct Interval {
    double lower;
    double upper;
};

struct CountReport {
    double rate;
    std::uint64_t trials;
    std::uint64_t coincidences;
    double estimate;
    double confidence;
    Interval ci;
};

struct CoincidencePlan {
    double true_rate;
    double threshold;
    double confidence;
};

struct SweepRow {
    double angle;
    double predicted;
    double estimate;
    Interval ci;
};

/// Classical bound on the single-direction coincidence rate of the symmetric test: 2/5.
inline constexpr double kClassicalRate = 0.4;

SpinState biphoton_state(const StokesDirection& p);

/// Hanbury Brown-Twiss coincidence rate |<l|psi>|^2 behind filters selecting
/// the orthogonal polarizations +-l. visibility v maps r to v r + (1 - v)/4.
double coincidence_rate(const StokesDirection& l, const SpinState& psi, double visibility = 1.0);

/// arccos(5^{-1/4}): angle between filter axis and state at which cos^2 = 1/sqrt5.
double symmetric_test_angle();

/// Exact (Clopper-Pearson) two-sided interval for k successes in n trials.
Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence);

/// Bernoulli(rate) coincidence counting, deterministic per seed.
CountReport simulate_counts(double rate, std::uint64_t trials, std::uint64_t seed, double confidence = 0.95);

/// Whether k coincidences out of n put the estimate on the wrong side of the
/// threshold (ties count as wrong).
bool wrong_side(const CoincidencePlan& p, std::uint64_t k, std::uint64_t n);

/// Exact binomial probability that the estimate lands on the wrong side.
double wrong_side_probability(const CoincidencePlan& p, std::uint64_t n);

/// Smallest n whose wrong-side probability is <= 1 - confidence.
/// Throws InfeasiblePlan when true_rate == threshold or max_trials is exceeded.
std::uint64_t plan_trials(const CoincidencePlan& p, std::uint64_t max_trials = 100'000'000);

/// Predicted and simulated rates for filter axes at the given angles from a
/// neutrally polarized state. Row i uses stream i of the seed.
std::vector<SweepRow> sweep(const std::vector<double>& angles, std::uint64_t trials, std::uint64_t seed,
                            double confidence = 0.95, double visibility = 1.0);

}  // namespace kcbs::biphoton

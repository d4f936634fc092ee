#include "kcbs/biphoton.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>

#include "kcbs/error.hpp"
#include "kcbs/rng.hpp"

namespace kcbs::biphoton {

namespace {

void check_rate(double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidInput(std::string(what) + " must lie in [0, 1]");
}

void check_confidence(double c) {
    if (!(c > 0.0 && c < 1.0)) throw InvalidInput("confidence must lie in (0, 1)");
}

// threshold * n, snapped to the nearest integer when only rounding separates them,
// so that a tie k == threshold * n is recognised as one.
double cut_point(double threshold, std::uint64_t n) {
    const double c = threshold * static_cast<double>(n);
    const double r = std::round(c);
    return std::abs(c - r) <= 1e-9 * std::max(1.0, c) ? r : c;
}

}  // namespace

SpinState biphoton_state(const StokesDirection& p) { return SpinState::along(p); }

double coincidence_rate(const StokesDirection& l, const SpinState& psi, double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) throw InvalidInput("visibility must lie in [0, 1]");
    const double r = std::norm(overlap(l, psi));
    return visibility * r + (1.0 - visibility) * 0.25;
}

double symmetric_test_angle() { return std::acos(std::pow(5.0, -0.25)); }

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
    check_confidence(confidence);
    if (n == 0 || k > n) throw InvalidInput("clopper_pearson: need 0 <= k <= n, n >= 1");
    using boost::math::binomial_distribution;
    const double alpha = 0.5 * (1.0 - confidence);
    const auto nd = static_cast<double>(n);
    const auto kd = static_cast<double>(k);
    const double lo = k == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(nd, kd, alpha);
    const double hi = k == n ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(nd, kd, alpha);
    return {lo, hi};
}

CountReport simulate_counts(double rate, std::uint64_t trials, std::uint64_t seed, double confidence) {
    check_rate(rate, "rate");
    if (trials == 0) throw InvalidInput("trials must be >= 1");
    CounterRng rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        if (rng.uniform() < rate) ++hits;
    }
    const double est = static_cast<double>(hits) / static_cast<double>(trials);
    return {rate, trials, hits, est, confidence, clopper_pearson(hits, trials, confidence)};
}

bool wrong_side(const CoincidencePlan& p, std::uint64_t k, std::uint64_t n) {
    const double kd = static_cast<double>(k);
    const double cut = cut_point(p.threshold, n);
    return p.true_rate > p.threshold ? kd <= cut : kd >= cut;
}

double wrong_side_probability(const CoincidencePlan& p, std::uint64_t n) {
    check_rate(p.true_rate, "true_rate");
    check_rate(p.threshold, "threshold");
    if (n == 0) return 1.0;
    const boost::math::binomial_distribution<> dist(static_cast<double>(n), p.true_rate);
    const double cut = cut_point(p.threshold, n);
    if (p.true_rate > p.threshold) {
        const double kmax = std::floor(cut);
        return boost::math::cdf(dist, kmax);
    }
    const double kmin = std::ceil(cut);
    if (kmin <= 0.0) return 1.0;
    return boost::math::cdf(boost::math::complement(dist, kmin - 1.0));
}

std::uint64_t plan_trials(const CoincidencePlan& p, std::uint64_t max_trials) {
    check_rate(p.true_rate, "true_rate");
    check_rate(p.threshold, "threshold");
    check_confidence(p.confidence);
    if (p.true_rate == p.threshold) throw InfeasiblePlan("plan_trials: true rate equals the threshold");
    const double budget = 1.0 - p.confidence;
    for (std::uint64_t n = 1; n <= max_trials; ++n) {
        if (wrong_side_probability(p, n) <= budget) return n;
    }
    throw InfeasiblePlan("plan_trials: no n up to the trial cap meets the confidence");
}

std::vector<SweepRow> sweep(const std::vector<double>& angles, std::uint64_t trials, std::uint64_t seed,
                            double confidence, double visibility) {
    const Direction axis(0.0, 0.0, 1.0);
    const SpinState psi = biphoton_state(axis);
    const CounterRng root(seed);
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const Direction l(std::sin(angles[i]), 0.0, std::cos(angles[i]), true);
        const double predicted = coincidence_rate(l, psi, visibility);
        const std::uint64_t stream_seed = root.split(i)();
        const CountReport rep = simulate_counts(predicted, trials, stream_seed, confidence);
        rows.push_back({angles[i], predicted, rep.estimate, rep.ci});
    }
    return rows;
}

}  // namespace kcbs::biphoton

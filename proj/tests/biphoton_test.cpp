#include <doctest.h>

#include <cmath>

#include "kcbs/biphoton.hpp"
#include "kcbs/error.hpp"
#include "kcbs/oracles.hpp"

using namespace kcbs;
using namespace kcbs::biphoton;

namespace {
const double kRt5 = std::sqrt(5.0);
}

TEST_CASE("biphoton state") {
    const SpinState s = biphoton_state(Direction(0, 0, 1));
    CHECK((s.amplitudes() - CVec3(0, 0, 1)).norm() == 0.0);
    oracle::Sampler rng(41);
    for (int k = 0; k < 20; ++k) {
        const SpinState b = biphoton_state(rng.direction());
        CHECK(concurrence(b) == doctest::Approx(1.0));
        CHECK(degree_of_polarization(b) == doctest::Approx(0.0));
    }
}

TEST_CASE("coincidence rate") {
    const double d = symmetric_test_angle();
    CHECK(std::abs(d - 0.8383) < 5e-4);
    CHECK(std::abs(std::cos(d) * std::cos(d) - 1 / kRt5) < 1e-12);
    CHECK(std::abs(5 * std::cos(d) * std::cos(d) - kRt5) < 1e-12);

    const SpinState psi = biphoton_state(Direction(0, 0, 1));
    const Direction at(std::sin(d), 0, std::cos(d));
    CHECK(coincidence_rate(at, psi) == doctest::Approx(1 / kRt5).epsilon(1e-14));
    CHECK(coincidence_rate(Direction(0, 0, 1), psi) == doctest::Approx(1.0));
    CHECK(coincidence_rate(Direction(1, 0, 0), psi) == doctest::Approx(0.0));
    CHECK(coincidence_rate(Direction(0, 0, 1), psi, 0.8) == doctest::Approx(0.8 + 0.05));
    CHECK_THROWS_AS(coincidence_rate(at, psi, 1.5), InvalidInput);
}

TEST_CASE("Clopper-Pearson") {
    const auto z = clopper_pearson(0, 10, 0.95);
    CHECK(z.lower == 0.0);
    CHECK(z.upper == doctest::Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-10));
    const auto h = clopper_pearson(5, 10, 0.95);
    CHECK(h.lower == doctest::Approx(0.187086).epsilon(1e-5));
    CHECK(h.upper == doctest::Approx(0.812914).epsilon(1e-5));
    const auto all = clopper_pearson(10, 10, 0.95);
    CHECK(all.upper == 1.0);
    CHECK(all.lower == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-10));
}

TEST_CASE("simulate counts") {
    CHECK(simulate_counts(0.0, 1000, 1).coincidences == 0);
    CHECK(simulate_counts(1.0, 1000, 1).coincidences == 1000);
    const auto r = simulate_counts(0.44721, 100000, 12345);
    CHECK(r.ci.lower <= r.estimate);
    CHECK(r.estimate <= r.ci.upper);
    CHECK(r.ci.upper - r.ci.lower < 0.01);
    CHECK(r.ci.lower <= 0.44721);
    CHECK(r.ci.upper >= 0.44721);
    CHECK(simulate_counts(0.3, 500, 7).coincidences == simulate_counts(0.3, 500, 7).coincidences);
    CHECK_THROWS_AS(simulate_counts(1.2, 10, 1), InvalidInput);
}

TEST_CASE("trial planning") {
    const CoincidencePlan base{1 / kRt5, kClassicalRate, 0.95};
    const auto n = plan_trials(base);
    CHECK(n == 287);
    CHECK(n == oracle::plan_trials_bruteforce(1 / kRt5, 2, 5, 0.95));
    CHECK(wrong_side_probability(base, n) <= 0.05);
    CHECK(wrong_side_probability(base, n - 1) > 0.05);

    CHECK(plan_trials({1 / kRt5, 0.4, 0.5}) < n);
    CHECK(plan_trials({0.9, 0.4, 0.95}) < n);
    CHECK(plan_trials({0.2, 0.4, 0.95}) > 0);
    CHECK_THROWS_AS(plan_trials({0.4, 0.4, 0.95}), InfeasiblePlan);

    // With n = 5, k = 2 is exactly on the threshold and counts as wrong.
    CHECK(wrong_side(base, 2, 5));
    CHECK_FALSE(wrong_side(base, 3, 5));
}

TEST_CASE("sweep") {
    const auto rows = sweep({0.0, symmetric_test_angle(), M_PI / 2}, 2000, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].predicted == doctest::Approx(1.0));
    CHECK(rows[1].predicted == doctest::Approx(1 / kRt5));
    CHECK(rows[2].predicted == doctest::Approx(0.0));
    for (const auto& r : rows) {
        CHECK(r.ci.lower <= r.estimate);
        CHECK(r.estimate <= r.ci.upper);
    }
    // Rows depend only on their index, not on the other rows.
    const auto again = sweep({0.0, symmetric_test_angle()}, 2000, 3);
    CHECK(again[1].estimate == rows[1].estimate);
}

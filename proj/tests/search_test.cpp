#include <doctest.h>

#include <cmath>

#include "kcbs/error.hpp"
#include "kcbs/search.hpp"

using namespace kcbs;
using namespace kcbs::search;

namespace {

const double kRt5 = std::sqrt(5.0);

SearchConfig quick(std::uint64_t seed) {
    SearchConfig c;
    c.restarts = 8;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("regular_K") {
    CHECK(regular_K(0) == doctest::Approx(kRt5).epsilon(1e-15));
    const double phi_star = 0.5 * std::acos(1 / kRt5);
    CHECK(std::abs(regular_K(phi_star) - 2) < 1e-12);
    // Matches direct evaluation on the regular pentagram about m.
    for (double phi : {0.0, 0.2, phi_star, 0.7, M_PI / 4}) {
        const Pentagram p = regular_pentagram(Direction(1, 0, 0));
        CHECK(std::abs(regular_K(phi) - kcbs_sum(p, canonical_state(phi))) < 1e-12);
    }
}

TEST_CASE("regular pentagrams are best aligned with m") {
    for (double phi : {0.1, 0.3, 0.6}) {
        const SpinState psi = canonical_state(phi);
        double best = 0;
        for (int i = 0; i <= 40; ++i) {
            for (int j = 0; j < 80; ++j) {
                const double th = M_PI / 2 * i / 40, az = 2 * M_PI * j / 80;
                const Direction axis(std::sin(th) * std::cos(az), std::sin(th) * std::sin(az), std::cos(th));
                for (double chi : {0.0, 0.3, 0.9})
                    best = std::max(best, kcbs_sum(regular_pentagram(axis, chi), psi));
            }
        }
        CHECK(best <= regular_K(phi) + 1e-12);
    }
}

TEST_CASE("optimizer examples") {
    const auto neutral = optimize_pentagram(SpinState(0, 0, 1), quick(1));
    CHECK(neutral.k >= kRt5 - 1e-6);
    CHECK(neutral.violation == doctest::Approx(neutral.k - 2));
    CHECK(neutral.trace.size() == 8);

    const double r = 1 / std::sqrt(2.0);
    const auto coh = optimize_pentagram(SpinState(r, Complex(0, r), 0), quick(2));
    for (const auto& t : coh.trace) CHECK(t.k <= 2 + 1e-6);

    const auto skew = optimize_pentagram(state_with_concurrence(0.3), quick(3));
    CHECK(skew.k > 2);
    CHECK(kcbs_sum(skew.pentagram, state_with_concurrence(0.3)) == doctest::Approx(skew.k).epsilon(1e-12));
}

TEST_CASE("detection scan") {
    const auto rows = detection_scan({1.0, 0.2, 0.0}, quick(4));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].violated);
    CHECK(rows[0].k == doctest::Approx(kRt5).epsilon(1e-6));
    CHECK(rows[1].violated);
    CHECK_FALSE(rows[2].violated);
}

TEST_CASE("search is deterministic per seed") {
    const SpinState psi = state_with_concurrence(0.5);
    const auto a = optimize_pentagram(psi, quick(9));
    const auto b = optimize_pentagram(psi, quick(9));
    CHECK(a.k == b.k);
    for (int i = 0; i < 5; ++i) CHECK(a.pentagram.leg(i).vec() == b.pentagram.leg(i).vec());
}

TEST_CASE("config validation") {
    SearchConfig c;
    c.restarts = 0;
    CHECK_THROWS_AS(validate(c), InvalidInput);
    c = SearchConfig{};
    c.tol = 0;
    CHECK_THROWS_AS(validate(c), InvalidInput);
    c = SearchConfig{};
    c.max_iterations = 0;
    CHECK_THROWS_AS(validate(c), InvalidInput);
    CHECK_NOTHROW(validate(SearchConfig{}));
}

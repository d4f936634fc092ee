#include <doctest.h>

#include <cmath>

#include "kcbs/oracles.hpp"

using namespace kcbs;

// The reference computations are themselves checked on hand-worked cases.

TEST_CASE("oracle binomial tail") {
    // n = 1: wrong iff the single trial fails (estimate 0 <= 2/5).
    CHECK(oracle::wrong_side_bruteforce(0.7, 2, 5, 1) == doctest::Approx(0.3));
    // n = 5, p = 1/2: wrong iff k <= 2.
    CHECK(oracle::wrong_side_bruteforce(0.5, 2, 5, 5) == doctest::Approx(0.5));
}

TEST_CASE("oracle extremality") {
    CHECK(oracle::extremal_by_rank(hv::pentagram_ray()));
    CHECK(oracle::extremal_by_rank(hv::chsh_ray()));
    // Sum of two trivial rays is not extremal.
    const auto t = hv::trivial_rays(hv::ContextStructure::pentagram5());
    std::vector<mpq_class> sum(t[0].coeffs.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = t[0].coeffs[i] + t[5].coeffs[i];
    CHECK_FALSE(oracle::extremal_by_rank(hv::make_ray(t[0].structure, sum)));
    CHECK(oracle::indicator_coeffs(hv::ContextStructure::pentagram5()).size() == 20);
}

TEST_CASE("oracle pure concurrence") {
    const double r = 1 / std::sqrt(2.0);
    CHECK(oracle::pure_concurrence(Eigen::Vector4cd(0, r, r, 0)) == doctest::Approx(1.0));
    CHECK(oracle::pure_concurrence(Eigen::Vector4cd(1, 0, 0, 0)) == doctest::Approx(0.0));
}

#include <doctest.h>

#include <gmpxx.h>

#include "kcbs/simplex.hpp"

using namespace kcbs;

TEST_CASE("simplex optimum and duals") {
    // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
    const std::vector<std::vector<double>> a = {{1, 2, 1, 0}, {3, 1, 0, 1}};
    const auto r = lp::solve<double>(a, {4, 6}, {-1, -1, 0, 0}, 1e-11);
    REQUIRE(r.status == lp::Status::optimal);
    CHECK(r.x[0] == doctest::Approx(1.6));
    CHECK(r.x[1] == doctest::Approx(1.2));
    CHECK(r.objective == doctest::Approx(-2.8));
    // Strong duality: b^T pi = objective.
    CHECK(4 * r.duals[0] + 6 * r.duals[1] == doctest::Approx(-2.8));
}

TEST_CASE("simplex infeasible and unbounded") {
    CHECK(lp::solve<double>({{1, 1}}, {-1}, {0, 0}, 1e-11).status == lp::Status::infeasible);
    // x - y = 0, min -x.
    CHECK(lp::solve<double>({{1, -1}}, {0}, {-1, 0}, 1e-11).status == lp::Status::unbounded);
}

TEST_CASE("simplex redundant rows") {
    const auto r = lp::solve<double>({{1, 1}, {2, 2}}, {1, 2}, {1, 2}, 1e-11);
    REQUIRE(r.status == lp::Status::optimal);
    CHECK(r.objective == doctest::Approx(1.0));
}

TEST_CASE("simplex over rationals") {
    using Q = mpq_class;
    const std::vector<std::vector<Q>> a = {{1, 2, 1, 0}, {3, 1, 0, 1}};
    const auto r = lp::solve<Q>(a, {4, 6}, {-1, -1, 0, 0}, Q(0));
    REQUIRE(r.status == lp::Status::optimal);
    CHECK(r.x[0] == Q(8, 5));
    CHECK(r.x[1] == Q(6, 5));
    CHECK(r.objective == Q(-14, 5));
    CHECK(4 * r.duals[0] + 6 * r.duals[1] == Q(-14, 5));
}

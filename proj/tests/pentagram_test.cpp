#include <doctest.h>

#include <cmath>

#include "kcbs/error.hpp"
#include "kcbs/oracles.hpp"
#include "kcbs/pentagram.hpp"

using namespace kcbs;

namespace {

const double kRt5 = std::sqrt(5.0);

SpinState coherent(const Vec3& m, const Vec3& n) {
    return SpinState((m.cast<Complex>() + Complex(0, 1) * n.cast<Complex>()) / std::sqrt(2.0));
}

bool same_legs(const Pentagram& a, const Pentagram& b, double tol) {
    for (int i = 0; i < 5; ++i)
        if (!a.leg(i).equals(b.leg(i), true, tol)) return false;
    return true;
}

/// Chain angle placing `next` in the completion frame of `prev`.
double frame_angle(const Vec3& prev, const Vec3& next) {
    const auto [m, n] = orthonormal_completion(prev);
    return std::atan2(next.dot(n), next.dot(m));
}

}  // namespace

TEST_CASE("regular pentagram") {
    const Pentagram p = regular_pentagram(Direction(0, 0, 1));
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(p.leg(i).z()) == doctest::Approx(std::pow(5.0, -0.25)).epsilon(1e-14));
        CHECK(std::abs(p.leg(i).vec().dot(p.leg(i + 1).vec())) < 1e-12);
        CHECK(std::norm(overlap(p.leg(i), SpinState(0, 0, 1))) == doctest::Approx(1 / kRt5));
    }
    CHECK(regular_cos2() == doctest::Approx(1 / kRt5));

    // Rotating the z pentagram onto x gives a regular pentagram about x with some phase chi.
    const Pentagram rot = p.rotated(Rotation::axis_angle(Vec3(0, 1, 0), M_PI / 2));
    bool matched = false;
    for (double sign : {1.0, -1.0}) {
        const Vec3 v = sign * rot.leg(0).vec();
        const auto [m, n] = orthonormal_completion(Vec3(1, 0, 0));
        matched = matched || same_legs(regular_pentagram(Direction(1, 0, 0), std::atan2(v.dot(n), v.dot(m))), rot, 1e-12);
    }
    CHECK(matched);
}

TEST_CASE("chain chart reproduces the regular pentagram") {
    const Pentagram reg = regular_pentagram(Direction(0.2, -0.4, 0.8, true), 0.7);
    ChainParams cp{reg.leg(0), {}};
    for (int k = 0; k < 3; ++k) cp.t[k] = frame_angle(reg.leg(k).vec(), reg.leg(k + 1).vec());
    CHECK(same_legs(from_chain(cp), reg, 1e-12));
}

TEST_CASE("degenerate closure") {
    // l3 = l1 x l2 lets l4 return to l1.
    const Vec3 l1 = Vec3(1, 2, 3).normalized();
    const Vec3 l2 = l1.cross(Vec3(0.3, -1, 0.2)).normalized();
    const Vec3 path[4] = {l1, l2, l1.cross(l2), l1};
    ChainParams bad{Direction(path[0]), {}};
    for (int k = 0; k < 3; ++k) bad.t[k] = frame_angle(path[k], path[k + 1]);
    CHECK(chain_closure_margin(bad) < 1e-12);
    CHECK_THROWS_AS(from_chain(bad), DegenerateClosure);
}

TEST_CASE("random chains satisfy the invariants") {
    oracle::Sampler rng(17);
    for (int k = 0; k < 200; ++k) {
        const Pentagram p = rng.pentagram();
        for (int i = 0; i < 5; ++i) {
            CHECK(std::abs(p.leg(i).vec().norm() - 1) < 1e-12);
            CHECK(std::abs(p.leg(i).vec().dot(p.leg(i + 1).vec())) < 1e-10);
        }
    }
}

TEST_CASE("kcbs sums") {
    const Pentagram p = regular_pentagram(Direction(0, 0, 1));
    const SpinState axis(0, 0, 1);
    CHECK(kcbs_sum(p, axis) == doctest::Approx(kRt5).epsilon(1e-14));
    CHECK(kcbs_spin_form(p, axis) == doctest::Approx(5 - kRt5).epsilon(1e-14));
    CHECK(correlation_form(p, axis) == doctest::Approx(5 - 4 * kRt5).epsilon(1e-14));

    // Coherent state of the frame orthogonal to the axis: each leg gives (1 - 1/sqrt5)/2.
    const SpinState perp = coherent(Vec3(1, 0, 0), Vec3(0, 1, 0));
    CHECK(kcbs_sum(p, perp) == doctest::Approx((5 - kRt5) / 2).epsilon(1e-14));
    CHECK(kcbs_spin_form(p, perp) == doctest::Approx(5 - (5 - kRt5) / 2).epsilon(1e-14));
    CHECK(correlation_form(p, perp) == doctest::Approx(4 * (5 - (5 - kRt5) / 2) - 15).epsilon(1e-13));

    // Axis along m instead: 1/sqrt5 * 1/2 + (1 - 1/sqrt5)/4 per leg.
    const SpinState along = coherent(Vec3(0, 0, 1), Vec3(1, 0, 0));
    CHECK(kcbs_sum(p, along) == doctest::Approx(kRt5 / 2 + 1.25 * (1 - 1 / kRt5)).epsilon(1e-14));

    oracle::Sampler rng(23);
    for (int k = 0; k < 100; ++k) {
        const Pentagram q = rng.pentagram();
        const SpinState psi = rng.state();
        std::array<Vec3, 5> legs;
        for (int i = 0; i < 5; ++i) legs[i] = q.leg(i).vec();
        CHECK(kcbs_sum(q, psi) + kcbs_spin_form(q, psi) == doctest::Approx(5.0).epsilon(1e-14));
        CHECK(std::abs(kcbs_sum(q, psi) - oracle::kcbs_sum_direct(legs, psi.amplitudes())) < 1e-12);
        CHECK(std::abs(correlation_form(q, psi) - oracle::correlation_form_operator(legs, psi.amplitudes())) < 1e-12);
        CHECK(kcbs_sum(q, psi) <= gram_max(q) + 1e-12);
    }
}

TEST_CASE("state along the first leg") {
    // l1 = z; the legs orthogonal to it contribute exact zeros.
    const Pentagram p = from_chain(ChainParams{Direction(0, 0, 1), {0.4, 1.1, -0.7}});
    const SpinState psi = SpinState::along(p.leg(0));
    const auto o = leg_overlaps(p, psi);
    CHECK(o[0] == 1.0);
    CHECK(o[1] == 0.0);
    CHECK(o[4] == 0.0);
    const double c3 = p.leg(2).vec().dot(p.leg(0).vec()), c4 = p.leg(3).vec().dot(p.leg(0).vec());
    CHECK(kcbs_sum(p, psi) == doctest::Approx(1 + c3 * c3 + c4 * c4));
    CHECK(kcbs_sum(p, psi) <= 2.0 + 1e-12);
}

TEST_CASE("gram operator") {
    const Pentagram p = regular_pentagram(Direction(0, 0, 1));
    CHECK(gram_max(p) == doctest::Approx(kRt5).epsilon(1e-12));
    CHECK(gram_max_direction(p).equals(Direction(0, 0, 1), true, 1e-10));
    oracle::Sampler rng(29);
    for (int k = 0; k < 200; ++k) {
        const Pentagram q = rng.pentagram();
        CHECK(q.gram_operator().trace() == doctest::Approx(5.0).epsilon(1e-10));
        CHECK(gram_max(q) <= kRt5 + 1e-9);
    }
}

#include "kcbs/pentagram.hpp"

#include <cmath>
#include <sstream>

#include "kcbs/error.hpp"

namespace kcbs {

namespace {

std::array<Direction, 5> canonical_legs(const std::array<Direction, 5>& legs) {
    return {legs[0].canonical(), legs[1].canonical(), legs[2].canonical(), legs[3].canonical(),
            legs[4].canonical()};
}

Vec3 in_plane(const Vec3& normal, double t) {
    const auto [m, n] = orthonormal_completion(normal);
    return m * std::cos(t) + n * std::sin(t);
}

}  // namespace

Pentagram::Pentagram(const std::array<Direction, 5>& legs) : legs_(canonical_legs(legs)) {
    for (int i = 0; i < 5; ++i) {
        const double d = legs_[i].vec().dot(legs_[(i + 1) % 5].vec());
        if (std::abs(d) > kOrthogonalityTolerance) {
            std::ostringstream os;
            os << "Pentagram: legs " << i << " and " << (i + 1) % 5 << " are not orthogonal (dot " << d << ")";
            throw InvalidInput(os.str());
        }
        for (int j = i + 1; j < 5; ++j) {
            if (std::abs(legs_[i].vec().dot(legs_[j].vec())) >= 1.0 - kOrthogonalityTolerance) {
                std::ostringstream os;
                os << "Pentagram: legs " << i << " and " << j << " are parallel";
                throw InvalidInput(os.str());
            }
        }
    }
}

Mat3 Pentagram::gram_operator() const {
    Mat3 g = Mat3::Zero();
    for (const auto& l : legs_) g += l.vec() * l.vec().transpose();
    return g;
}

Pentagram Pentagram::rotated(const Rotation& r) const {
    return Pentagram({r.apply(legs_[0]), r.apply(legs_[1]), r.apply(legs_[2]), r.apply(legs_[3]), r.apply(legs_[4])});
}

double regular_cos2() { return 1.0 / std::sqrt(5.0); }

Pentagram regular_pentagram(const Direction& axis, double chi) {
    const double cos_theta = std::pow(5.0, -0.25);
    const double sin_theta = std::sqrt(1.0 - cos_theta * cos_theta);
    const auto [e1, e2] = orthonormal_completion(axis.vec());
    std::array<Direction, 5> legs{axis, axis, axis, axis, axis};
    for (int k = 0; k < 5; ++k) {
        const double az = 4.0 * M_PI * k / 5.0 + chi;
        legs[k] = Direction(axis.vec() * cos_theta + sin_theta * (e1 * std::cos(az) + e2 * std::sin(az)), true);
    }
    return Pentagram(legs);
}

double chain_closure_margin(const ChainParams& p) {
    const Vec3 l2 = in_plane(p.l1.vec(), p.t[0]);
    const Vec3 l3 = in_plane(l2, p.t[1]);
    const Vec3 l4 = in_plane(l3, p.t[2]);
    return l4.cross(p.l1.vec()).norm();
}

Pentagram from_chain(const ChainParams& p) {
    const Vec3 l1 = p.l1.vec();
    const Vec3 l2 = in_plane(l1, p.t[0]);
    const Vec3 l3 = in_plane(l2, p.t[1]);
    const Vec3 l4 = in_plane(l3, p.t[2]);
    const Vec3 closing = l4.cross(l1);
    if (closing.norm() < 1e-8) {
        throw DegenerateClosure("from_chain: fourth leg is parallel to the first, fifth leg undefined");
    }
    return Pentagram({p.l1, Direction(l2, true), Direction(l3, true), Direction(l4, true), Direction(closing, true)});
}

std::array<double, 5> leg_overlaps(const Pentagram& p, const SpinState& psi) {
    std::array<double, 5> out{};
    for (int k = 0; k < 5; ++k) out[k] = std::norm(overlap(p.leg(k), psi));
    return out;
}

double kcbs_sum(const Pentagram& p, const SpinState& psi) {
    double k = 0.0;
    for (double q : leg_overlaps(p, psi)) k += q;
    return k;
}

double kcbs_spin_form(const Pentagram& p, const SpinState& psi) { return 5.0 - kcbs_sum(p, psi); }

double correlation_form(const Pentagram& p, const SpinState& psi) {
    return 4.0 * kcbs_spin_form(p, psi) - 15.0;
}

double gram_max(const Pentagram& p) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(p.gram_operator());
    return es.eigenvalues()[2];
}

Direction gram_max_direction(const Pentagram& p) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(p.gram_operator());
    return Direction(es.eigenvectors().col(2), true).canonical();
}

}  // namespace kcbs

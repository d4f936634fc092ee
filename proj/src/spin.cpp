#include "kcbs/spin.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kcbs/error.hpp"

namespace kcbs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// Vectors already unit to within rounding are stored untouched, so that
// serialized values read back bit-for-bit.
constexpr double kUnitSlack = 4 * std::numeric_limits<double>::epsilon();

Vec3 checked_unit(const Vec3& v, bool normalize, const char* what) {
    const double norm = v.norm();
    if (!std::isfinite(norm) || norm == 0.0) {
        throw InvalidInput(std::string(what) + ": zero or non-finite vector");
    }
    if (!normalize && std::abs(norm - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os << what << ": norm " << norm << " deviates from 1";
        throw InvalidInput(os.str());
    }
    return std::abs(norm - 1.0) <= kUnitSlack ? v : Vec3(v / norm);
}

}  // namespace

Direction::Direction(const Vec3& v, bool normalize) : v_(checked_unit(v, normalize, "Direction")) {}

Direction Direction::canonical() const {
    for (int i = 2; i >= 0; --i) {
        if (v_[i] > 0.0) return *this;
        if (v_[i] < 0.0) return -*this;
    }
    return *this;
}

bool Direction::equals(const Direction& other, bool sign_insensitive, double tol) const {
    if ((v_ - other.v_).cwiseAbs().maxCoeff() <= tol) return true;
    return sign_insensitive && (v_ + other.v_).cwiseAbs().maxCoeff() <= tol;
}

SpinState::SpinState(const CVec3& amplitudes, bool normalize) {
    const double norm = amplitudes.norm();
    if (!std::isfinite(norm) || norm == 0.0) throw InvalidInput("SpinState: zero or non-finite amplitudes");
    if (!normalize && std::abs(norm - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os << "SpinState: norm " << norm << " deviates from 1";
        throw InvalidInput(os.str());
    }
    a_ = std::abs(norm - 1.0) <= kUnitSlack ? amplitudes : CVec3(amplitudes / norm);
}

SpinState SpinState::real(const Vec3& v, bool normalize) {
    return SpinState(v.cast<Complex>(), normalize);
}

SpinState SpinState::with_phase(double alpha) const {
    return SpinState(a_ * std::polar(1.0, alpha));
}

SpinState CanonicalForm::reconstruct() const {
    const CVec3 v = m.vec().cast<Complex>() * std::cos(phi) + Complex(0.0, 1.0) * n.vec().cast<Complex>() * std::sin(phi);
    return SpinState(phase * v);
}

Eigen::Vector4cd TwoQubitSymmetricState::product_amplitudes() const {
    return Eigen::Vector4cd(c_plus, c_zero * kInvSqrt2, c_zero * kInvSqrt2, c_minus);
}

Rotation::Rotation(const Mat3& m) : m_(m) {
    const double orth = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!(orth <= 1e-12) || std::abs(m.determinant() - 1.0) > 1e-12) {
        throw InvalidInput("Rotation: matrix is not a proper rotation");
    }
}

Rotation Rotation::axis_angle(const Vec3& axis, double angle) {
    const Eigen::AngleAxisd aa(angle, axis.normalized());
    return Rotation(aa.toRotationMatrix());
}

Direction Rotation::apply(const Direction& l) const {
    return Direction(m_ * l.vec(), true);
}

std::pair<Vec3, Vec3> orthonormal_completion(const Vec3& l) {
    int k = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(l[i]) < std::abs(l[k])) k = i;
    }
    Vec3 e = Vec3::Zero();
    e[k] = 1.0;
    const Vec3 m = (e - l * l[k]).normalized();
    const Vec3 n = l.cross(m);
    return {m, n};
}

Complex overlap(const Direction& l, const SpinState& psi) {
    return l.vec().cast<Complex>().dot(psi.amplitudes());  // l is real, so no conjugation issue
}

CVec3 spin_apply(const Direction& l, const CVec3& v) {
    // Spelled out: Eigen's cross() conjugates its result for complex scalars.
    const Vec3& a = l.vec();
    const CVec3 c(a[1] * v[2] - a[2] * v[1], a[2] * v[0] - a[0] * v[2], a[0] * v[1] - a[1] * v[0]);
    return Complex(0.0, 1.0) * c;
}

double s_squared_expectation(const Direction& l, const SpinState& psi) {
    return 1.0 - std::norm(overlap(l, psi));
}

std::array<SpinState, 3> eigenbasis(const Direction& l) {
    const auto [m, n] = orthonormal_completion(l.vec());
    const CVec3 mc = m.cast<Complex>();
    const CVec3 nc = n.cast<Complex>();
    const Complex i(0.0, 1.0);
    return {SpinState::along(l), SpinState((mc + i * nc) * kInvSqrt2), SpinState((mc - i * nc) * kInvSqrt2)};
}

CanonicalForm to_canonical(const SpinState& psi) {
    const CVec3& a = psi.amplitudes();
    const Complex s = a.cwiseProduct(a).sum();
    // Rotating the global phase by -arg(s)/2 makes sum(a_j^2) real and
    // nonnegative, which forces Re psi' orthogonal to Im psi' and |Re| >= |Im|.
    const double alpha = std::abs(s) > 0.0 ? 0.5 * std::arg(s) : 0.0;
    const CVec3 rotated = a * std::polar(1.0, -alpha);
    const Vec3 u = rotated.real();
    Vec3 v = rotated.imag();

    const double cu = u.norm();
    const Vec3 m = u / cu;
    v -= m * m.dot(v);
    const double sv = v.norm();
    Vec3 n;
    if (sv > 1e-15) {
        n = v / sv;
    } else {
        n = orthonormal_completion(m).first;
    }

    CanonicalForm form{std::atan2(sv, cu), Direction(m, true), Direction(n, true), std::polar(1.0, alpha)};
    if (form.phi > M_PI / 4) form.phi = M_PI / 4;
    if (!form.m.equals(form.m.canonical(), false, 0.0)) {
        form.m = -form.m;
        form.n = -form.n;
        form.phase = -form.phase;
    }
    return form;
}

SpinState canonical_state(double phi) {
    return SpinState(Complex(std::cos(phi), 0.0), Complex(0.0, std::sin(phi)), Complex(0.0, 0.0));
}

SpinState state_with_concurrence(double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw InvalidInput("concurrence must lie in [0, 1]");
    return canonical_state(0.5 * std::acos(c));
}

double concurrence(const SpinState& psi) {
    const CVec3& a = psi.amplitudes();
    return std::min(1.0, std::abs(a.cwiseProduct(a).sum()));
}

double degree_of_polarization(const SpinState& psi) {
    const double c = concurrence(psi);
    return std::sqrt(std::max(0.0, 1.0 - c * c));
}

SpinState rotate(const SpinState& psi, const Rotation& r) {
    return SpinState(r.matrix().cast<Complex>() * psi.amplitudes(), true);
}

TwoQubitSymmetricState two_qubit(const SpinState& psi) {
    const CVec3& a = psi.amplitudes();
    const Complex i(0.0, 1.0);
    // Projections onto |1> = -(x + i y)/sqrt2, |0> = z, |-1> = (x - i y)/sqrt2.
    return {-(a[0] - i * a[1]) * kInvSqrt2, a[2], (a[0] + i * a[1]) * kInvSqrt2};
}

SpinState from_two_qubit(const TwoQubitSymmetricState& s) {
    const Complex i(0.0, 1.0);
    const CVec3 plus = CVec3(-1.0, -i, 0.0) * kInvSqrt2;
    const CVec3 zero(0.0, 0.0, 1.0);
    const CVec3 minus = CVec3(1.0, -i, 0.0) * kInvSqrt2;
    return SpinState(s.c_plus * plus + s.c_zero * zero + s.c_minus * minus, true);
}

double wootters_concurrence(const TwoQubitSymmetricState& s) {
    const Eigen::Vector4cd psi = s.product_amplitudes();
    Eigen::Matrix2cd sy;
    sy << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    Eigen::Matrix4cd flip;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) flip.block<2, 2>(2 * r, 2 * c) = sy(r, c) * sy;
    const Eigen::Vector4cd tilde = flip * psi.conjugate();
    return std::abs(psi.dot(tilde));
}

}  // namespace kcbs

#pragma once

// Spin-1 states and observables in the complexified Euclidean picture:
// the state space is C^3 = R^3 (x) C, rotations act componentwise, and the
// spin projection onto a real axis l acts by S_l psi = i (l x psi).

#include <array>
#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace kcbs {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;

/// Constructors reject inputs whose norm is further than this from 1.
inline constexpr double kNormTolerance = 1e-9;

/// Real unit 3-vector. l and -l are physically equivalent for every
/// quantity computed in this library.
class Direction {
public:
    explicit Direction(const Vec3& v, bool normalize = false);
    Direction(double x, double y, double z, bool normalize = false)
        : Direction(Vec3(x, y, z), normalize) {}

    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }
    const Vec3& vec() const { return v_; }

    Direction operator-() const { return Direction(-v_); }

    /// Representative of {l, -l} in the hemisphere z > 0 (ties: y > 0, then x > 0).
    Direction canonical() const;

    /// Componentwise equality; with sign_insensitive, l == -l.
    bool equals(const Direction& other, bool sign_insensitive, double tol = 1e-12) const;

private:
    Vec3 v_;
};

/// Pure spin-1 state: three complex amplitudes over a real orthonormal basis.
class SpinState {
public:
    explicit SpinState(const CVec3& amplitudes, bool normalize = false);
    SpinState(Complex a1, Complex a2, Complex a3, bool normalize = false)
        : SpinState(CVec3(a1, a2, a3), normalize) {}

    /// Real (neutrally polarized) state along v.
    static SpinState real(const Vec3& v, bool normalize = false);
    static SpinState along(const Direction& l) { return real(l.vec()); }

    const CVec3& amplitudes() const { return a_; }
    Complex operator[](int i) const { return a_[i]; }

    /// e^{i alpha} psi.
    SpinState with_phase(double alpha) const;

private:
    CVec3 a_;
};

/// psi = phase * (m cos(phi) + i n sin(phi)) with phi in [0, pi/4].
struct CanonicalForm {
    double phi;
    Direction m;
    Direction n;
    Complex phase;

    SpinState reconstruct() const;
};

/// Amplitudes on the symmetric triplet {|uu>, (|ud>+|du>)/sqrt2, |dd>}.
struct TwoQubitSymmetricState {
    Complex c_plus;
    Complex c_zero;
    Complex c_minus;

    /// Amplitudes in the product basis |uu>, |ud>, |du>, |dd>.
    Eigen::Vector4cd product_amplitudes() const;
};

/// Proper rotation of R^3.
class Rotation {
public:
    /// Rejects matrices that are not orthogonal with determinant +1 (tolerance 1e-12).
    explicit Rotation(const Mat3& m);

    static Rotation identity() { return Rotation(Mat3::Identity()); }
    static Rotation axis_angle(const Vec3& axis, double angle);

    const Mat3& matrix() const { return m_; }
    Direction apply(const Direction& l) const;
    Rotation inverse() const { return Rotation(m_.transpose()); }

private:
    Mat3 m_;
};

/// Orthonormal completion {l, m, n} of a unit vector: m is Gram-Schmidt of the
/// coordinate axis on which l has the smallest |component|, n = l x m.
std::pair<Vec3, Vec3> orthonormal_completion(const Vec3& l);

/// <l|psi> for a real direction l.
Complex overlap(const Direction& l, const SpinState& psi);

/// S_l v = i (l x v), extended complex-linearly; v need not be normalized.
CVec3 spin_apply(const Direction& l, const CVec3& v);
inline CVec3 spin_apply(const Direction& l, const SpinState& psi) { return spin_apply(l, psi.amplitudes()); }

/// <psi|S_l^2|psi> = 1 - |<l|psi>|^2.
double s_squared_expectation(const Direction& l, const SpinState& psi);

/// Eigenstates of S_l with eigenvalues 0, +1, -1: l, (m + i n)/sqrt2, (m - i n)/sqrt2.
std::array<SpinState, 3> eigenbasis(const Direction& l);

CanonicalForm to_canonical(const SpinState& psi);

/// cos(phi) e_x + i sin(phi) e_y.
SpinState canonical_state(double phi);

/// Canonical state with concurrence c, i.e. cos(2 phi) = c.
SpinState state_with_concurrence(double c);

/// |a1^2 + a2^2 + a3^2|.
double concurrence(const SpinState& psi);

/// sqrt(1 - c^2).
double degree_of_polarization(const SpinState& psi);

SpinState rotate(const SpinState& psi, const Rotation& r);

/// Symmetric two-qubit image of psi, using the z-axis eigenbasis with
/// Condon-Shortley phases |1> = -(e_x + i e_y)/sqrt2, |0> = e_z, |-1> = (e_x - i e_y)/sqrt2.
TwoQubitSymmetricState two_qubit(const SpinState& psi);

/// Inverse of two_qubit.
SpinState from_two_qubit(const TwoQubitSymmetricState& s);

/// Pure-state concurrence |<psi| sigma_y (x) sigma_y |psi*>|.
double wootters_concurrence(const TwoQubitSymmetricState& s);

}  // namespace kcbs

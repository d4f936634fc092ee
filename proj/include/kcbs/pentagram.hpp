#pragma once

#include <array>

#include "kcbs/spin.hpp"

namespace kcbs {

/// Orthogonality tolerance for externally supplied legs.
inline constexpr double kOrthogonalityTolerance = 1e-10;

/// Five real unit directions with l_i orthogonal to l_{i+1} (indices mod 5).
/// Legs are stored in canonical sign; every quantity here is even in each leg.
class Pentagram {
public:
    explicit Pentagram(const std::array<Direction, 5>& legs);

    const Direction& leg(int i) const { return legs_[((i % 5) + 5) % 5]; }
    const std::array<Direction, 5>& legs() const { return legs_; }

    /// Sum of l_k l_k^T.
    Mat3 gram_operator() const;

    Pentagram rotated(const Rotation& r) const;

private:
    std::array<Direction, 5> legs_;
};

/// Chart on pentagram space: l2, l3, l4 are placed at angles t1, t2, t3 in the
/// completion frame of the plane orthogonal to their predecessor, and l5 closes the cycle.
struct ChainParams {
    Direction l1;
    std::array<double, 3> t;
};

/// Legs at polar angle arccos(5^{-1/4}) about the axis with azimuths 4 pi k / 5 + chi.
Pentagram regular_pentagram(const Direction& axis, double chi = 0.0);

/// cos^2 of the polar angle of a regular pentagram leg: 1/sqrt5.
double regular_cos2();

/// Throws DegenerateClosure when |l4 x l1| < 1e-8.
Pentagram from_chain(const ChainParams& p);

/// |l4 x l1| of the chain, i.e. the distance from closure degeneracy.
double chain_closure_margin(const ChainParams& p);

/// Per-leg |<l_k|psi>|^2.
std::array<double, 5> leg_overlaps(const Pentagram& p, const SpinState& psi);

/// K = sum_k |<l_k|psi>|^2. K > 2 certifies nonclassicality.
double kcbs_sum(const Pentagram& p, const SpinState& psi);

/// sum_k <S_{l_k}^2> = 5 - K. Classical bound >= 3.
double kcbs_spin_form(const Pentagram& p, const SpinState& psi);

/// sum_i <A_i A_{i+1}> with A = 1 - 2|l><l|. Equals 4 (5 - K) - 15; classical bound >= -3.
double correlation_form(const Pentagram& p, const SpinState& psi);

/// Largest eigenvalue of the Gram operator: the maximum of K over all states.
double gram_max(const Pentagram& p);

/// Unit eigenvector of the Gram operator for gram_max.
Direction gram_max_direction(const Pentagram& p);

}  // namespace kcbs

#pragma once

// Independent reference computations used to check the library. Each one is
// written from the definitions, avoiding the code paths it is compared with.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kcbs/hv.hpp"
#include "kcbs/pentagram.hpp"
#include "kcbs/spin.hpp"

namespace kcbs::oracle {

/// Random inputs for property checks.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(gen_);
    }
    double normal() { return std::normal_distribution<double>()(gen_); }
    /// k / den for a uniform integer k in [lo, hi], canonicalized.
    mpq_class rational(long lo, long hi, long den) {
        mpq_class q(std::uniform_int_distribution<long>(lo, hi)(gen_), den);
        q.canonicalize();
        return q;
    }

    Vec3 unit_vector();
    Direction direction() { return Direction(unit_vector()); }
    SpinState state();
    /// (m + i n)/sqrt2 for a random orthonormal pair.
    SpinState coherent_state();
    Rotation rotation();
    /// Random chain pentagram, resampled until the closure is well conditioned.
    Pentagram pentagram();

private:
    std::mt19937_64 gen_;
};

// --- geometry ---------------------------------------------------------------

double kcbs_sum_direct(const std::array<Vec3, 5>& legs, const CVec3& psi);
/// sum_i <psi|A_i A_{i+1}|psi> from explicit 3x3 matrices A = 1 - 2 l l^T.
double correlation_form_operator(const std::array<Vec3, 5>& legs, const CVec3& psi);
/// 2 |a_uu a_dd - a_ud a_du| for a product-basis vector.
double pure_concurrence(const Eigen::Vector4cd& amps);

// --- hidden-variable cone -------------------------------------------------

/// F(x) for every assignment, by multiplying +-1 values one observable at a time.
std::vector<std::int64_t> ray_values(const hv::RayFunction& r);
/// Nonnegative, nonzero, and the zero set has rank dimension - 1.
bool extremal_by_rank(const hv::RayFunction& r, std::string* why = nullptr);
/// Primitive coefficients of every single-context outcome indicator.
std::vector<std::vector<std::int64_t>> indicator_coeffs(const hv::ContextStructure& s);
/// Some flip of base (applied coefficientwise) equals r.
bool is_flip_image(const hv::RayFunction& r, const hv::RayFunction& base);

mpq_class expectation_from_tables(const hv::RayFunction& r, const hv::ExactModel& m);
double expectation_from_tables(const hv::RayFunction& r, const hv::FloatModel& m);
/// Marginal tables of a joint distribution, indexed through outcome labels.
hv::ExactModel marginalize(const hv::ContextStructure& s, const hv::JointDistribution<mpq_class>& w);
bool pushes_forward_to(const hv::JointDistribution<mpq_class>& w, const hv::ExactModel& m);

// --- binomial -----------------------------------------------------------------

/// P(estimate on the wrong side of num/den) for Binomial(n, p), summing the pmf
/// term by term. Ties count as wrong.
double wrong_side_bruteforce(double p, std::uint64_t num, std::uint64_t den, std::uint64_t n);
/// Smallest n with wrong_side_bruteforce <= 1 - confidence.
std::uint64_t plan_trials_bruteforce(double p, std::uint64_t num, std::uint64_t den, double confidence);

}  // namespace kcbs::oracle

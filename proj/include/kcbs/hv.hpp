#pragma once

// Hidden-variable (marginal problem) engine for +-1 observables.
//
// Assignments of n observables are encoded as bitmasks: bit i set means
// a_i = -1. A context table over observables (i_0, ..., i_{k-1}) is indexed
// with i_0 as the most significant bit and '-' as 0, so for a pair the order
// is "--", "-+", "+-", "++".

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "kcbs/pentagram.hpp"

namespace kcbs::hv {

/// Largest n accepted by anything that walks all 2^n assignments.
inline constexpr int kMaxObservables = 20;

/// Default consistency slack for float models.
inline constexpr double kFloatConsistency = 2e-12;

using Mask = std::uint32_t;

class ContextStructure {
public:
    ContextStructure(int n, std::vector<std::vector<int>> contexts);

    /// 5 observables, contexts {i, i+1 mod 5}.
    static ContextStructure pentagram5();
    /// A1, A2, B1, B2 (indices 0..3), contexts {A_i, B_j}.
    static ContextStructure chsh();
    /// Two observables in one context.
    static ContextStructure single_pair();

    int n() const { return n_; }
    std::size_t assignment_count() const { return std::size_t{1} << n_; }
    const std::vector<std::vector<int>>& contexts() const { return contexts_; }
    std::size_t context_size(std::size_t c) const { return contexts_[c].size(); }

    /// Monomial basis: every nonempty subset of every context plus the empty
    /// set, as masks ordered by (size, sorted index list).
    const std::vector<Mask>& monomials() const { return monomials_; }
    std::size_t dimension() const { return monomials_.size(); }
    /// Index of a monomial in the basis, or -1.
    int monomial_index(Mask s) const;
    /// "1", "a0", "a0a1", ...
    std::string monomial_name(std::size_t idx) const;
    /// Inverse of monomial_name; -1 if the name is not in the basis.
    int monomial_from_name(const std::string& name) const;

    /// Table index of an assignment restricted to context c.
    std::size_t outcome_index(std::size_t c, Mask assignment) const;
    /// Assignment mask (restricted to the context's observables) for a table index.
    Mask outcome_mask(std::size_t c, std::size_t outcome) const;
    /// "-+" style label for a table index of context c.
    std::string outcome_label(std::size_t c, std::size_t outcome) const;

    bool operator==(const ContextStructure& o) const { return n_ == o.n_ && contexts_ == o.contexts_; }
    bool operator!=(const ContextStructure& o) const { return !(*this == o); }

private:
    int n_;
    std::vector<std::vector<int>> contexts_;
    std::vector<Mask> monomials_;
};

/// (-1)^{|S & x|}: value of the monomial a_S at assignment x.
inline int monomial_value(Mask s, Mask x) { return (__builtin_popcount(s & x) & 1) ? -1 : 1; }

/// Per-context joint outcome tables. T is double (float mode) or mpq_class (exact mode).
template <class T>
struct MarginalModel {
    ContextStructure structure;
    std::vector<std::vector<T>> tables;
};

using ExactModel = MarginalModel<mpq_class>;
using FloatModel = MarginalModel<double>;

/// Weights over all 2^n assignments.
template <class T>
struct JointDistribution {
    int n = 0;
    std::vector<T> weights;
};

enum class RayClass { trivial, nontrivial };

/// Extremal element of the cone of nonnegative functions sum_I f_I(a_I),
/// as a primitive integer vector on the structure's monomial basis.
struct RayFunction {
    ContextStructure structure;
    std::vector<std::int64_t> coeffs;
    RayClass cls = RayClass::nontrivial;

    /// F(x) for every assignment.
    std::vector<std::int64_t> values() const;
    bool operator==(const RayFunction& o) const { return structure == o.structure && coeffs == o.coeffs; }
};

enum class Verdict { feasible, infeasible, indeterminate };

std::string to_string(Verdict v);
std::string to_string(RayClass c);

template <class T>
struct HvCertificate {
    Verdict verdict = Verdict::indeterminate;
    std::optional<JointDistribution<T>> witness;
    std::optional<RayFunction> violated;
    /// Expectation of the (primitive) violated ray under the model.
    T violated_expectation{};
    /// min E(F) over cone elements normalized to constant term 1; its sign is the verdict.
    T margin{};
};

// --- models ---------------------------------------------------------------

/// Validates tables (nonnegative, unit sum) and overlap consistency; throws
/// InvalidInput / InconsistentModel.
void validate(const ExactModel& m);
void validate(const FloatModel& m, double slack = kFloatConsistency);

/// <a_S> for each monomial, read from the first context containing S.
std::vector<mpq_class> moments(const ExactModel& m);
std::vector<double> moments(const FloatModel& m);

/// Rebuilds context tables from monomial moments.
ExactModel model_from_moments(const ContextStructure& s, const std::vector<mpq_class>& mu);
FloatModel model_from_moments(const ContextStructure& s, const std::vector<double>& mu);

/// Exact image of a float model: every double is taken at face value and each
/// table's all-plus entry absorbs the rounding of the unit sum. Tables that
/// disagree beyond kFloatConsistency throw InconsistentModel; smaller rounding
/// disagreements are removed by rebuilding from context-averaged moments.
ExactModel to_exact(const FloatModel& m);
FloatModel to_float(const ExactModel& m);

template <class T>
MarginalModel<T> pushforward(const ContextStructure& s, const JointDistribution<T>& joint);

/// Quantum marginals of the pentagram observables A_i = 1 - 2|l_i><l_i|.
FloatModel marginals_from_state(const Pentagram& p, const SpinState& psi);

/// Exact pentagram5 model from rational leg probabilities q_i = P(A_i = -1).
ExactModel pentagram_model(const std::vector<mpq_class>& q);

// --- decision -------------------------------------------------------------

/// Exact decision. `radius` bounds the error of each moment against the
/// true (possibly irrational) model; verdicts that the interval cannot
/// separate come back indeterminate. radius = 0 treats the data as exact.
HvCertificate<mpq_class> lp_feasible(const ExactModel& m, const mpq_class& radius = 0);

/// Floating-point decision; |margin| <= tol is indeterminate.
HvCertificate<double> lp_feasible(const FloatModel& m, double tol = 1e-9);

mpq_class ray_expectation(const RayFunction& r, const ExactModel& m);
double ray_expectation(const RayFunction& r, const FloatModel& m);

// --- cone -----------------------------------------------------------------

/// Outcome indicators of single contexts, primitive, in canonical order.
std::vector<RayFunction> trivial_rays(const ContextStructure& s);

/// All extremal rays by double description over exact integers, classified
/// and sorted by coefficient vector. Throws ScaleGuard for n > kMaxObservables.
std::vector<RayFunction> enumerate_extremal_rays(const ContextStructure& s);

/// The pentagram5 ray a0a1 + a1a2 + a2a3 + a3a4 + a4a0 + 3.
RayFunction pentagram_ray();

/// The chsh ray 2 - (A1B1 + A1B2 + A2B1 - A2B2).
RayFunction chsh_ray();

/// Relabel outcomes -1 <-> +1 for observables in `s`.
RayFunction flip(const RayFunction& r, Mask s);
template <class T>
MarginalModel<T> flip(const MarginalModel<T>& m, Mask s);

/// Primitive integer ray through F (constant term need not be 1).
RayFunction make_ray(const ContextStructure& s, const std::vector<mpq_class>& coeffs);

}  // namespace kcbs::hv

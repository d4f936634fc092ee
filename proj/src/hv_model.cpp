#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "kcbs/error.hpp"
#include "kcbs/hv.hpp"

namespace kcbs::hv {

namespace {

std::vector<int> indices_of(Mask s) {
    std::vector<int> out;
    for (int i = 0; s != 0; ++i, s >>= 1) {
        if (s & 1u) out.push_back(i);
    }
    return out;
}

Mask context_mask(const std::vector<int>& ctx) {
    Mask m = 0;
    for (int i : ctx) m |= Mask{1} << i;
    return m;
}

// Probability of each outcome of the observables in `sub` (a subset of
// context c), indexed by the restricted assignment mask.
template <class T>
std::vector<std::pair<Mask, T>> sub_marginal(const MarginalModel<T>& m, std::size_t c, Mask sub) {
    std::vector<std::pair<Mask, T>> out;
    const auto& table = m.tables[c];
    for (std::size_t t = 0; t < table.size(); ++t) {
        const Mask key = m.structure.outcome_mask(c, t) & sub;
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == key; });
        if (it == out.end()) {
            out.emplace_back(key, table[t]);
        } else {
            it->second += table[t];
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

template <class T>
bool close(const T& a, const T& b, double slack) {
    if constexpr (std::is_same_v<T, double>) {
        return std::abs(a - b) <= slack;
    } else {
        (void)slack;
        return a == b;
    }
}

template <class T>
void validate_impl(const MarginalModel<T>& m, double slack) {
    const auto& s = m.structure;
    if (m.tables.size() != s.contexts().size()) throw InvalidInput("model: one table per context required");
    for (std::size_t c = 0; c < m.tables.size(); ++c) {
        const auto& table = m.tables[c];
        if (table.size() != (std::size_t{1} << s.context_size(c))) {
            throw InvalidInput("model: table " + std::to_string(c) + " has the wrong number of entries");
        }
        T sum(0);
        for (const auto& p : table) {
            if (p < T(-slack)) throw InvalidInput("model: negative probability in table " + std::to_string(c));
            sum += p;
        }
        if (!close(sum, T(1), slack)) throw InvalidInput("model: table " + std::to_string(c) + " does not sum to 1");
    }
    for (std::size_t a = 0; a < m.tables.size(); ++a) {
        for (std::size_t b = a + 1; b < m.tables.size(); ++b) {
            const Mask shared = context_mask(s.contexts()[a]) & context_mask(s.contexts()[b]);
            if (shared == 0) continue;
            const auto ma = sub_marginal(m, a, shared);
            const auto mb = sub_marginal(m, b, shared);
            for (std::size_t k = 0; k < ma.size(); ++k) {
                if (!close(ma[k].second, mb[k].second, slack)) {
                    std::ostringstream os;
                    os << "model: contexts " << a << " and " << b << " disagree on the marginal of observable";
                    for (int i : indices_of(shared)) os << " a" << i;
                    throw InconsistentModel(os.str(), a, b);
                }
            }
        }
    }
}

template <class T>
std::vector<T> moments_impl(const MarginalModel<T>& m) {
    const auto& s = m.structure;
    std::vector<T> mu(s.dimension(), T(0));
    mu[0] = T(1);
    for (std::size_t k = 1; k < s.dimension(); ++k) {
        const Mask mono = s.monomials()[k];
        for (std::size_t c = 0; c < s.contexts().size(); ++c) {
            if ((context_mask(s.contexts()[c]) & mono) != mono) continue;
            T v(0);
            for (std::size_t t = 0; t < m.tables[c].size(); ++t) {
                const T& p = m.tables[c][t];
                if (monomial_value(mono, s.outcome_mask(c, t)) > 0) {
                    v += p;
                } else {
                    v -= p;
                }
            }
            mu[k] = v;
            break;
        }
    }
    return mu;
}

template <class T>
MarginalModel<T> from_moments_impl(const ContextStructure& s, const std::vector<T>& mu) {
    if (mu.size() != s.dimension()) throw InvalidInput("moments: size does not match the monomial basis");
    MarginalModel<T> m{s, {}};
    for (std::size_t c = 0; c < s.contexts().size(); ++c) {
        const Mask cm = context_mask(s.contexts()[c]);
        const std::size_t size = std::size_t{1} << s.context_size(c);
        std::vector<T> table(size, T(0));
        for (std::size_t t = 0; t < size; ++t) {
            const Mask x = s.outcome_mask(c, t);
            T v(0);
            for (std::size_t k = 0; k < s.dimension(); ++k) {
                const Mask mono = s.monomials()[k];
                if ((mono & cm) != mono) continue;
                if (monomial_value(mono, x) > 0) {
                    v += mu[k];
                } else {
                    v -= mu[k];
                }
            }
            table[t] = v / T(static_cast<double>(size));
        }
        m.tables.push_back(std::move(table));
    }
    return m;
}

}  // namespace

ContextStructure::ContextStructure(int n, std::vector<std::vector<int>> contexts)
    : n_(n), contexts_(std::move(contexts)) {
    if (n < 1 || n > 31) throw InvalidInput("structure: number of observables out of range");
    if (contexts_.empty()) throw InvalidInput("structure: no contexts");
    std::vector<bool> covered(n, false);
    std::set<Mask> seen;
    std::set<Mask> monos{0};
    for (const auto& ctx : contexts_) {
        if (ctx.empty()) throw InvalidInput("structure: empty context");
        if (ctx.size() > static_cast<std::size_t>(kMaxObservables)) {
            throw ScaleGuard("structure: context of " + std::to_string(ctx.size()) + " observables; limit is " +
                             std::to_string(kMaxObservables));
        }
        Mask cm = 0;
        for (int i : ctx) {
            if (i < 0 || i >= n) throw InvalidInput("structure: observable index out of range");
            if (cm & (Mask{1} << i)) throw InvalidInput("structure: repeated index within a context");
            cm |= Mask{1} << i;
            covered[i] = true;
        }
        if (!seen.insert(cm).second) throw InvalidInput("structure: duplicate context");
        for (Mask sub = cm; sub != 0; sub = (sub - 1) & cm) monos.insert(sub);
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
        throw InvalidInput("structure: every observable must belong to a context");
    }
    monomials_.assign(monos.begin(), monos.end());
    std::sort(monomials_.begin(), monomials_.end(), [](Mask a, Mask b) {
        const int pa = __builtin_popcount(a);
        const int pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return indices_of(a) < indices_of(b);
    });
}

ContextStructure ContextStructure::pentagram5() {
    return ContextStructure(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
}

ContextStructure ContextStructure::chsh() { return ContextStructure(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}); }

ContextStructure ContextStructure::single_pair() { return ContextStructure(2, {{0, 1}}); }

int ContextStructure::monomial_index(Mask s) const {
    auto it = std::find(monomials_.begin(), monomials_.end(), s);
    return it == monomials_.end() ? -1 : static_cast<int>(it - monomials_.begin());
}

std::string ContextStructure::monomial_name(std::size_t idx) const {
    const Mask s = monomials_.at(idx);
    if (s == 0) return "1";
    std::string out;
    for (int i : indices_of(s)) out += "a" + std::to_string(i);
    return out;
}

int ContextStructure::monomial_from_name(const std::string& name) const {
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
        if (monomial_name(k) == name) return static_cast<int>(k);
    }
    return -1;
}

std::size_t ContextStructure::outcome_index(std::size_t c, Mask assignment) const {
    const auto& ctx = contexts_[c];
    std::size_t t = 0;
    for (int i : ctx) t = (t << 1) | ((assignment >> i) & 1u ? 0u : 1u);
    return t;
}

Mask ContextStructure::outcome_mask(std::size_t c, std::size_t outcome) const {
    const auto& ctx = contexts_[c];
    const std::size_t k = ctx.size();
    Mask x = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (((outcome >> (k - 1 - j)) & 1u) == 0) x |= Mask{1} << ctx[j];
    }
    return x;
}

std::string ContextStructure::outcome_label(std::size_t c, std::size_t outcome) const {
    const std::size_t k = contexts_[c].size();
    std::string out(k, '+');
    for (std::size_t j = 0; j < k; ++j) {
        if (((outcome >> (k - 1 - j)) & 1u) == 0) out[j] = '-';
    }
    return out;
}

std::vector<std::int64_t> RayFunction::values() const {
    std::vector<std::int64_t> out(structure.assignment_count(), 0);
    for (Mask x = 0; x < out.size(); ++x) {
        std::int64_t v = 0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * monomial_value(structure.monomials()[k], x);
        out[x] = v;
    }
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::feasible: return "feasible";
        case Verdict::infeasible: return "infeasible";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "?";
}

std::string to_string(RayClass c) { return c == RayClass::trivial ? "trivial" : "nontrivial"; }

void validate(const ExactModel& m) { validate_impl(m, 0.0); }
void validate(const FloatModel& m, double slack) { validate_impl(m, slack); }

std::vector<mpq_class> moments(const ExactModel& m) { return moments_impl(m); }
std::vector<double> moments(const FloatModel& m) { return moments_impl(m); }

ExactModel model_from_moments(const ContextStructure& s, const std::vector<mpq_class>& mu) {
    return from_moments_impl(s, mu);
}

FloatModel model_from_moments(const ContextStructure& s, const std::vector<double>& mu) {
    return from_moments_impl(s, mu);
}

ExactModel to_exact(const FloatModel& m) {
    // Doubles are taken exactly; each table's rounding residue goes into its
    // all-plus entry, which no marginal with a minus sign depends on, so
    // consistency of the doubles carries over. The largest entry takes it
    // instead when the all-plus entry would go negative.
    validate(m);
    ExactModel out{m.structure, {}};
    for (std::size_t c = 0; c < m.tables.size(); ++c) {
        const auto& table = m.tables[c];
        std::vector<mpq_class> t(table.begin(), table.end());
        std::size_t sink = m.structure.outcome_index(c, 0);
        mpq_class rest(0);
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (k != sink) rest += t[k];
        }
        if (rest > 1) {
            sink = static_cast<std::size_t>(std::max_element(table.begin(), table.end()) - table.begin());
            rest = 0;
            for (std::size_t k = 0; k < t.size(); ++k) {
                if (k != sink) rest += t[k];
            }
        }
        t[sink] = 1 - rest;
        out.tables.push_back(std::move(t));
    }
    try {
        validate(out);
        return out;
    } catch (const InconsistentModel&) {
    }
    // Average each moment over the contexts that contain it.
    const auto& s = m.structure;
    std::vector<mpq_class> mu(s.dimension(), mpq_class(0));
    mu[0] = 1;
    for (std::size_t k = 1; k < s.dimension(); ++k) {
        const Mask mono = s.monomials()[k];
        int count = 0;
        for (std::size_t c = 0; c < s.contexts().size(); ++c) {
            if ((context_mask(s.contexts()[c]) & mono) != mono) continue;
            mpq_class v(0);
            for (std::size_t t = 0; t < out.tables[c].size(); ++t) {
                v += monomial_value(mono, s.outcome_mask(c, t)) * out.tables[c][t];
            }
            mu[k] += v;
            ++count;
        }
        mu[k] /= count;
    }
    ExactModel rebuilt = model_from_moments(s, mu);
    validate(rebuilt);
    return rebuilt;
}

FloatModel to_float(const ExactModel& m) {
    FloatModel out{m.structure, {}};
    for (const auto& table : m.tables) {
        std::vector<double> t;
        for (const auto& p : table) t.push_back(p.get_d());
        out.tables.push_back(std::move(t));
    }
    return out;
}

template <class T>
MarginalModel<T> pushforward(const ContextStructure& s, const JointDistribution<T>& joint) {
    if (joint.n != s.n() || joint.weights.size() != s.assignment_count()) {
        throw StructureMismatch("pushforward: joint distribution does not match the structure");
    }
    MarginalModel<T> m{s, {}};
    for (std::size_t c = 0; c < s.contexts().size(); ++c) {
        std::vector<T> table(std::size_t{1} << s.context_size(c), T(0));
        for (Mask x = 0; x < joint.weights.size(); ++x) table[s.outcome_index(c, x)] += joint.weights[x];
        m.tables.push_back(std::move(table));
    }
    return m;
}

template ExactModel pushforward(const ContextStructure&, const JointDistribution<mpq_class>&);
template FloatModel pushforward(const ContextStructure&, const JointDistribution<double>&);

FloatModel marginals_from_state(const Pentagram& p, const SpinState& psi) {
    const auto q = leg_overlaps(p, psi);
    FloatModel m{ContextStructure::pentagram5(), {}};
    for (int i = 0; i < 5; ++i) {
        const double qi = q[i];
        const double qj = q[(i + 1) % 5];
        // Orthogonal rank-one projectors annihilate each other: P(-1,-1) = 0.
        m.tables.push_back({0.0, qi, qj, std::max(0.0, 1.0 - qi - qj)});
    }
    return m;
}

ExactModel pentagram_model(const std::vector<mpq_class>& q) {
    if (q.size() != 5) throw InvalidInput("pentagram_model: five leg probabilities required");
    ExactModel m{ContextStructure::pentagram5(), {}};
    for (int i = 0; i < 5; ++i) {
        const mpq_class& qi = q[i];
        const mpq_class& qj = q[(i + 1) % 5];
        if (qi < 0 || qi > 1 || qi + qj > 1) throw InvalidInput("pentagram_model: leg probabilities out of range");
        m.tables.push_back({mpq_class(0), qi, qj, 1 - qi - qj});
    }
    return m;
}

template <class T>
MarginalModel<T> flip(const MarginalModel<T>& m, Mask s) {
    MarginalModel<T> out = m;
    for (std::size_t c = 0; c < m.tables.size(); ++c) {
        for (std::size_t t = 0; t < m.tables[c].size(); ++t) {
            const Mask x = m.structure.outcome_mask(c, t) ^ s;
            out.tables[c][m.structure.outcome_index(c, x)] = m.tables[c][t];
        }
    }
    return out;
}

template ExactModel flip(const ExactModel&, Mask);
template FloatModel flip(const FloatModel&, Mask);

RayFunction flip(const RayFunction& r, Mask s) {
    RayFunction out = r;
    for (std::size_t k = 0; k < r.coeffs.size(); ++k) out.coeffs[k] *= monomial_value(r.structure.monomials()[k], s);
    return out;
}

mpq_class ray_expectation(const RayFunction& r, const ExactModel& m) {
    if (r.structure != m.structure) throw StructureMismatch("ray_expectation: ray and model structures differ");
    const auto mu = moments(m);
    mpq_class e(0);
    for (std::size_t k = 0; k < mu.size(); ++k) e += mpq_class(static_cast<long>(r.coeffs[k])) * mu[k];
    return e;
}

double ray_expectation(const RayFunction& r, const FloatModel& m) {
    if (r.structure != m.structure) throw StructureMismatch("ray_expectation: ray and model structures differ");
    const auto mu = moments(m);
    double e = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) e += static_cast<double>(r.coeffs[k]) * mu[k];
    return e;
}

}  // namespace kcbs::hv

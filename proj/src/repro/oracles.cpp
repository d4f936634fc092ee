#include "kcbs/oracles.hpp"

#include <cmath>

#include "kcbs/error.hpp"

namespace kcbs::oracle {

using hv::Mask;

Vec3 Sampler::unit_vector() {
    for (;;) {
        const Vec3 v(normal(), normal(), normal());
        if (v.norm() > 1e-6) return v.normalized();
    }
}

SpinState Sampler::state() {
    CVec3 a;
    for (int i = 0; i < 3; ++i) a[i] = Complex(normal(), normal());
    return SpinState(a, true);
}

SpinState Sampler::coherent_state() {
    const Vec3 m = unit_vector();
    Vec3 n = unit_vector();
    n = (n - n.dot(m) * m).normalized();
    CVec3 a;
    for (int i = 0; i < 3; ++i) a[i] = Complex(m[i], n[i]) / std::sqrt(2.0);
    return SpinState(a, true);
}

Rotation Sampler::rotation() {
    // Uniform on SO(3) via a random unit quaternion.
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return Rotation(q.toRotationMatrix());
}

Pentagram Sampler::pentagram() {
    for (;;) {
        ChainParams p{direction(), {uniform(0, 2 * M_PI), uniform(0, 2 * M_PI), uniform(0, 2 * M_PI)}};
        if (chain_closure_margin(p) > 1e-3) return from_chain(p);
    }
}

double kcbs_sum_direct(const std::array<Vec3, 5>& legs, const CVec3& psi) {
    double k = 0;
    for (const auto& l : legs) {
        Complex o = 0;
        for (int j = 0; j < 3; ++j) o += l[j] * psi[j];
        k += std::norm(o);
    }
    return k;
}

double correlation_form_operator(const std::array<Vec3, 5>& legs, const CVec3& psi) {
    using M = std::array<std::array<double, 3>, 3>;
    std::array<M, 5> a{};
    for (int k = 0; k < 5; ++k) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[k][r][c] = (r == c ? 1.0 : 0.0) - 2.0 * legs[k][r] * legs[k][c];
        }
    }
    double total = 0;
    for (int k = 0; k < 5; ++k) {
        const M& x = a[k];
        const M& y = a[(k + 1) % 5];
        Complex e = 0;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                double xy = 0;
                for (int j = 0; j < 3; ++j) xy += x[r][j] * y[j][c];
                e += std::conj(psi[r]) * xy * psi[c];
            }
        }
        total += e.real();
    }
    return total;
}

double pure_concurrence(const Eigen::Vector4cd& a) { return 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]); }

std::vector<std::int64_t> ray_values(const hv::RayFunction& r) {
    const auto& s = r.structure;
    std::vector<std::int64_t> out(s.assignment_count(), 0);
    for (Mask x = 0; x < out.size(); ++x) {
        for (std::size_t k = 0; k < s.dimension(); ++k) {
            std::int64_t v = 1;
            for (int i = 0; i < s.n(); ++i) {
                if (((s.monomials()[k] >> i) & 1u) && ((x >> i) & 1u)) v = -v;
            }
            out[x] += r.coeffs[k] * v;
        }
    }
    return out;
}

namespace {

// Rank by plain Gaussian elimination over the rationals.
std::size_t rank_of(std::vector<std::vector<mpq_class>> rows) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][c] == 0) continue;
            const mpq_class f = rows[r][c] / rows[rank][c];
            for (std::size_t j = c; j < cols; ++j) rows[r][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

int sign_at(const std::string& label, std::size_t pos) { return label[pos] == '-' ? -1 : 1; }

// Index of the first context containing every observable of the monomial.
std::size_t covering_context(const hv::ContextStructure& s, Mask mono) {
    for (std::size_t c = 0; c < s.contexts().size(); ++c) {
        Mask cm = 0;
        for (int i : s.contexts()[c]) cm |= Mask{1} << i;
        if ((mono & ~cm) == 0) return c;
    }
    throw StructureMismatch("monomial not covered by any context");
}

template <class T>
T expectation_impl(const hv::RayFunction& r, const hv::MarginalModel<T>& m) {
    const auto& s = m.structure;
    if (!(s == r.structure)) throw StructureMismatch("ray and model structures differ");
    T total = 0;
    for (std::size_t k = 0; k < s.dimension(); ++k) {
        if (r.coeffs[k] == 0) continue;
        const Mask mono = s.monomials()[k];
        const std::size_t c = covering_context(s, mono);
        const auto& ctx = s.contexts()[c];
        T e = 0;
        for (std::size_t o = 0; o < m.tables[c].size(); ++o) {
            const std::string label = s.outcome_label(c, o);
            int sign = 1;
            for (std::size_t j = 0; j < ctx.size(); ++j) {
                if ((mono >> ctx[j]) & 1u) sign *= sign_at(label, j);
            }
            e += sign > 0 ? T(m.tables[c][o]) : T(-m.tables[c][o]);
        }
        total += T(static_cast<double>(r.coeffs[k])) * e;
    }
    return total;
}

}  // namespace

bool extremal_by_rank(const hv::RayFunction& r, std::string* why) {
    const auto& s = r.structure;
    const auto vals = ray_values(r);
    std::vector<std::vector<mpq_class>> zero_rows;
    bool nonzero = false;
    for (Mask x = 0; x < vals.size(); ++x) {
        if (vals[x] < 0) {
            if (why) *why = "negative at an assignment";
            return false;
        }
        if (vals[x] > 0) {
            nonzero = true;
            continue;
        }
        std::vector<mpq_class> row;
        for (Mask mono : s.monomials()) row.emplace_back(__builtin_popcount(mono & x) % 2 ? -1 : 1);
        zero_rows.push_back(std::move(row));
    }
    if (!nonzero) {
        if (why) *why = "identically zero";
        return false;
    }
    const std::size_t rank = rank_of(std::move(zero_rows));
    if (rank + 1 != s.dimension()) {
        if (why) *why = "zero set rank " + std::to_string(rank) + ", need " + std::to_string(s.dimension() - 1);
        return false;
    }
    return true;
}

std::vector<std::vector<std::int64_t>> indicator_coeffs(const hv::ContextStructure& s) {
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t c = 0; c < s.contexts().size(); ++c) {
        const auto& ctx = s.contexts()[c];
        for (std::size_t o = 0; o < (std::size_t{1} << ctx.size()); ++o) {
            const std::string label = s.outcome_label(c, o);
            // prod_j (1 + s_j a_j): coefficient of a_T is prod_{j in T} s_j.
            std::vector<std::int64_t> coeffs(s.dimension(), 0);
            for (Mask sub = 0; sub < (Mask{1} << ctx.size()); ++sub) {
                Mask mono = 0;
                std::int64_t sign = 1;
                for (std::size_t j = 0; j < ctx.size(); ++j) {
                    if ((sub >> j) & 1u) {
                        mono |= Mask{1} << ctx[j];
                        sign *= sign_at(label, j);
                    }
                }
                coeffs[s.monomial_index(mono)] = sign;
            }
            out.push_back(std::move(coeffs));
        }
    }
    return out;
}

bool is_flip_image(const hv::RayFunction& r, const hv::RayFunction& base) {
    const auto& s = base.structure;
    if (!(s == r.structure)) return false;
    for (Mask f = 0; f < s.assignment_count(); ++f) {
        bool same = true;
        for (std::size_t k = 0; k < s.dimension() && same; ++k) {
            const std::int64_t c = __builtin_popcount(s.monomials()[k] & f) % 2 ? -base.coeffs[k] : base.coeffs[k];
            same = c == r.coeffs[k];
        }
        if (same) return true;
    }
    return false;
}

mpq_class expectation_from_tables(const hv::RayFunction& r, const hv::ExactModel& m) { return expectation_impl(r, m); }
double expectation_from_tables(const hv::RayFunction& r, const hv::FloatModel& m) { return expectation_impl(r, m); }

hv::ExactModel marginalize(const hv::ContextStructure& s, const hv::JointDistribution<mpq_class>& w) {
    hv::ExactModel m{s, {}};
    for (std::size_t c = 0; c < s.contexts().size(); ++c) {
        const auto& ctx = s.contexts()[c];
        std::vector<mpq_class> table;
        for (std::size_t o = 0; o < (std::size_t{1} << ctx.size()); ++o) {
            const std::string label = s.outcome_label(c, o);
            mpq_class p = 0;
            for (Mask x = 0; x < w.weights.size(); ++x) {
                bool match = true;
                for (std::size_t j = 0; j < ctx.size() && match; ++j) {
                    const bool minus = (x >> ctx[j]) & 1u;
                    match = minus == (label[j] == '-');
                }
                if (match) p += w.weights[x];
            }
            table.push_back(p);
        }
        m.tables.push_back(std::move(table));
    }
    return m;
}

bool pushes_forward_to(const hv::JointDistribution<mpq_class>& w, const hv::ExactModel& m) {
    if (w.n != m.structure.n()) return false;
    mpq_class total = 0;
    for (const auto& v : w.weights) {
        if (v < 0) return false;
        total += v;
    }
    return total == 1 && marginalize(m.structure, w).tables == m.tables;
}

double wrong_side_bruteforce(double p, std::uint64_t num, std::uint64_t den, std::uint64_t n) {
    const bool above = p * static_cast<double>(den) > static_cast<double>(num);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double total = 0;
    for (std::uint64_t k = 0; k <= n; ++k) {
        const bool wrong = above ? k * den <= num * n : k * den >= num * n;
        if (!wrong) continue;
        const auto kd = static_cast<double>(k);
        const auto nd = static_cast<double>(n);
        total += std::exp(std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1) + kd * lp + (nd - kd) * lq);
    }
    return total;
}

std::uint64_t plan_trials_bruteforce(double p, std::uint64_t num, std::uint64_t den, double confidence) {
    for (std::uint64_t n = 1;; ++n) {
        if (wrong_side_bruteforce(p, num, den, n) <= 1.0 - confidence) return n;
    }
}

}  // namespace kcbs::oracle

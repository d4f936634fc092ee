// Hidden-variable decision by linear programming.
//
// The marginal problem is solved through its moment form: find the smallest
// total mass of a nonnegative measure y on {-1,+1}^n whose nonconstant
// moments sum_x y_x a_S(x) equal the model's moments. Nonconstant characters
// sum to zero over the cube, so the uniform measure can top up any mass
// deficit: a joint distribution exists iff the minimum mass is <= 1.
//
// The LP dual is min E(F) over cone elements with constant term 1, so the
// optimal dual pi gives F = 1 - sum_S pi_S a_S, a vertex of that slice and
// hence an extremal ray. margin = 1 - min mass = E(F).

#include <algorithm>
#include <cmath>
#include <optional>

#include "exact_linalg.hpp"
#include "kcbs/error.hpp"
#include "kcbs/hv.hpp"
#include "kcbs/simplex.hpp"

namespace kcbs::hv {

namespace {

constexpr double kFloatPivotEps = 1e-11;

template <class T>
struct MassSolution {
    T min_mass;
    std::vector<T> y;
    std::vector<T> pi;
    std::vector<int> basis;
};

void guard(const ContextStructure& s) {
    if (s.n() > kMaxObservables) {
        throw ScaleGuard("structure has " + std::to_string(s.n()) + " observables; limit is " +
                         std::to_string(kMaxObservables));
    }
}

template <class T>
MassSolution<T> solve_mass(const ContextStructure& s, const std::vector<T>& mu, const T& eps) {
    guard(s);
    const std::size_t rows = s.dimension() - 1;
    const std::size_t cols = s.assignment_count();
    std::vector<std::vector<T>> a(rows, std::vector<T>(cols));
    std::vector<T> b(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const Mask mono = s.monomials()[r + 1];
        for (Mask x = 0; x < cols; ++x) a[r][x] = T(monomial_value(mono, x));
        b[r] = mu[r + 1];
    }
    std::vector<T> c(cols, T(1));
    auto res = lp::solve(a, b, c, eps);
    if (res.status != lp::Status::optimal) {
        // Unreachable for consistent moments: the characters span the space
        // and the objective is bounded below by 0.
        throw Error("hidden-variable LP failed to reach an optimum");
    }
    return {res.objective, std::move(res.x), std::move(res.duals), std::move(res.basis)};
}

// Within tol of the boundary the mass margin cannot separate a model on a
// nontrivial facet from one that merely has zero table entries (every such
// model has margin 0). Second LP: drop the assignments that hit an entry
// <= tol and maximize the smallest weight t on the rest. t > tol means the
// model is interior to its face and the verdict is stable.
struct InteriorSolution {
    double t;
    std::vector<double> y;
};

std::optional<InteriorSolution> interior_weight(const FloatModel& m, const std::vector<double>& mu, double tol) {
    const auto& s = m.structure;
    std::vector<Mask> allowed;
    for (Mask x = 0; x < s.assignment_count(); ++x) {
        bool ok = true;
        for (std::size_t c = 0; c < s.contexts().size() && ok; ++c) ok = m.tables[c][s.outcome_index(c, x)] > tol;
        if (ok) allowed.push_back(x);
    }
    if (allowed.empty()) return std::nullopt;
    const std::size_t rows = s.dimension();
    const std::size_t cols = allowed.size() + 1;  // z_x for allowed x, then t
    std::vector<std::vector<double>> a(rows, std::vector<double>(cols, 0.0));
    std::vector<double> b(mu.begin(), mu.end());
    for (std::size_t r = 0; r < rows; ++r) {
        const Mask mono = s.monomials()[r];
        for (std::size_t j = 0; j < allowed.size(); ++j) {
            const double v = monomial_value(mono, allowed[j]);
            a[r][j] = v;
            a[r][cols - 1] += v;
        }
    }
    std::vector<double> c(cols, 0.0);
    c[cols - 1] = -1.0;
    const auto res = lp::solve(a, b, c, kFloatPivotEps);
    if (res.status != lp::Status::optimal) return std::nullopt;
    InteriorSolution out{res.x[cols - 1], std::vector<double>(s.assignment_count(), 0.0)};
    for (std::size_t j = 0; j < allowed.size(); ++j) out.y[allowed[j]] = std::max(0.0, res.x[j]) + out.t;
    return out;
}

std::vector<RayFunction> sorted_unique(std::vector<RayFunction> rays) {
    std::sort(rays.begin(), rays.end(), [](const RayFunction& a, const RayFunction& b) { return a.coeffs < b.coeffs; });
    rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
    return rays;
}

}  // namespace

RayFunction make_ray(const ContextStructure& s, const std::vector<mpq_class>& coeffs) {
    if (coeffs.size() != s.dimension()) throw InvalidInput("make_ray: coefficient count does not match the basis");
    mpz_class lcm = 1;
    for (const auto& c : coeffs) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
    std::vector<mpz_class> ints;
    mpz_class g = 0;
    for (const auto& c : coeffs) {
        mpz_class v = c.get_num() * (lcm / c.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        ints.push_back(std::move(v));
    }
    if (g == 0) throw InvalidInput("make_ray: zero function");
    RayFunction r{s, {}, RayClass::nontrivial};
    for (auto& v : ints) {
        v /= g;
        if (!v.fits_slong_p()) throw Error("make_ray: coefficient exceeds 64 bits");
        r.coeffs.push_back(v.get_si());
    }
    for (const auto& t : trivial_rays(s)) {
        if (t.coeffs == r.coeffs) {
            r.cls = RayClass::trivial;
            break;
        }
    }
    return r;
}

std::vector<RayFunction> trivial_rays(const ContextStructure& s) {
    std::vector<RayFunction> out;
    for (std::size_t c = 0; c < s.contexts().size(); ++c) {
        Mask cm = 0;
        for (int i : s.contexts()[c]) cm |= Mask{1} << i;
        for (std::size_t t = 0; t < (std::size_t{1} << s.context_size(c)); ++t) {
            const Mask x = s.outcome_mask(c, t);
            RayFunction r{s, std::vector<std::int64_t>(s.dimension(), 0), RayClass::trivial};
            for (std::size_t k = 0; k < s.dimension(); ++k) {
                const Mask mono = s.monomials()[k];
                if ((mono & cm) == mono) r.coeffs[k] = monomial_value(mono, x);
            }
            out.push_back(std::move(r));
        }
    }
    return sorted_unique(std::move(out));
}

RayFunction pentagram_ray() {
    const auto s = ContextStructure::pentagram5();
    RayFunction r{s, std::vector<std::int64_t>(s.dimension(), 0), RayClass::nontrivial};
    r.coeffs[0] = 3;
    for (const auto& ctx : s.contexts()) r.coeffs[s.monomial_index((Mask{1} << ctx[0]) | (Mask{1} << ctx[1]))] = 1;
    return r;
}

RayFunction chsh_ray() {
    const auto s = ContextStructure::chsh();
    RayFunction r{s, std::vector<std::int64_t>(s.dimension(), 0), RayClass::nontrivial};
    r.coeffs[0] = 2;
    r.coeffs[s.monomial_index(0b0101)] = -1;  // A1 B1
    r.coeffs[s.monomial_index(0b1001)] = -1;  // A1 B2
    r.coeffs[s.monomial_index(0b0110)] = -1;  // A2 B1
    r.coeffs[s.monomial_index(0b1010)] = 1;   // A2 B2
    return r;
}

HvCertificate<mpq_class> lp_feasible(const ExactModel& m, const mpq_class& radius) {
    if (radius < 0) throw InvalidInput("lp_feasible: negative interval radius");
    validate(m);
    const auto& s = m.structure;
    const auto mu = moments(m);
    const auto sol = solve_mass(s, mu, mpq_class(0));

    HvCertificate<mpq_class> cert;
    cert.margin = 1 - sol.min_mass;

    std::vector<mpq_class> f(s.dimension());
    f[0] = 1;
    mpq_class l1 = 0;
    for (std::size_t k = 1; k < s.dimension(); ++k) {
        f[k] = -sol.pi[k - 1];
        l1 += abs(f[k]);
    }
    // |F_S| <= F_0 = 1 on the normalized slice, so every normalized cone
    // element moves by at most radius * (d - 1) under the interval.
    const bool feasible_sure = cert.margin - radius * static_cast<long>(s.dimension() - 1) >= 0;
    const bool infeasible_sure = cert.margin + radius * l1 < 0;

    if (cert.margin >= 0) {
        JointDistribution<mpq_class> w{s.n(), sol.y};
        const mpq_class top_up = (1 - sol.min_mass) / mpq_class(static_cast<unsigned long>(s.assignment_count()));
        for (auto& v : w.weights) v += top_up;
        cert.witness = std::move(w);
    } else {
        cert.violated = make_ray(s, f);
        cert.violated_expectation = ray_expectation(*cert.violated, m);
    }
    if (feasible_sure) {
        cert.verdict = Verdict::feasible;
    } else if (infeasible_sure) {
        cert.verdict = Verdict::infeasible;
    } else {
        cert.verdict = Verdict::indeterminate;
    }
    return cert;
}

HvCertificate<double> lp_feasible(const FloatModel& m, double tol) {
    validate(m);
    const auto& s = m.structure;
    const auto mu = moments(m);
    const auto sol = solve_mass(s, mu, kFloatPivotEps);

    HvCertificate<double> cert;
    cert.margin = 1.0 - sol.min_mass;

    if (cert.margin >= 0.0) {
        JointDistribution<double> w{s.n(), sol.y};
        const double top_up = cert.margin / static_cast<double>(s.assignment_count());
        for (auto& v : w.weights) v = std::max(0.0, v) + top_up;
        cert.witness = std::move(w);
    } else {
        // The optimal basis pins the ray: F vanishes on every basic assignment.
        // Re-solve that system exactly to recover the integer ray.
        const std::size_t d = s.dimension();
        detail::QMatrix a;
        std::vector<mpq_class> b;
        for (int x : sol.basis) {
            if (x < 0 || static_cast<std::size_t>(x) >= s.assignment_count()) continue;
            std::vector<mpq_class> row;
            for (std::size_t k = 1; k < d; ++k) row.emplace_back(monomial_value(s.monomials()[k], static_cast<Mask>(x)));
            a.push_back(std::move(row));
            b.emplace_back(-1);
        }
        std::vector<mpq_class> f(d);
        f[0] = 1;
        auto exact = a.size() == d - 1 ? detail::solve_square(a, b) : std::nullopt;
        if (exact) {
            for (std::size_t k = 1; k < d; ++k) f[k] = (*exact)[k - 1];
        } else {
            for (std::size_t k = 1; k < d; ++k) f[k] = mpq_class(-sol.pi[k - 1]);
        }
        cert.violated = make_ray(s, f);
        cert.violated_expectation = ray_expectation(*cert.violated, m);
    }
    if (cert.margin > tol) {
        cert.verdict = Verdict::feasible;
    } else if (cert.margin < -tol) {
        cert.verdict = Verdict::infeasible;
    } else if (auto in = interior_weight(m, mu, tol); in && in->t > tol) {
        cert.verdict = Verdict::feasible;
        cert.violated.reset();
        cert.violated_expectation = 0.0;
        cert.witness = JointDistribution<double>{s.n(), std::move(in->y)};
    } else {
        cert.verdict = Verdict::indeterminate;
    }
    return cert;
}

}  // namespace kcbs::hv

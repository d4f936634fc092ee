// Extremal rays of the cone {F in span(context monomials) : F(x) >= 0 for all x}
// by the double description method over exact integers.

#include <algorithm>

#include <boost/dynamic_bitset.hpp>

#include "exact_linalg.hpp"
#include "kcbs/error.hpp"
#include "kcbs/hv.hpp"

namespace kcbs::hv {

namespace {

struct DdRay {
    std::vector<mpz_class> v;
    // Processed constraints on which the ray is tight.
    boost::dynamic_bitset<> zeros;
};

void make_primitive(std::vector<mpz_class>& v) {
    mpz_class g = 0;
    for (const auto& c : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g > 1) {
        for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    }
}

mpz_class row_dot(const std::vector<int>& row, const std::vector<mpz_class>& v) {
    mpz_class s = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] > 0) {
            s += v[k];
        } else {
            s -= v[k];
        }
    }
    return s;
}

}  // namespace

std::vector<RayFunction> enumerate_extremal_rays(const ContextStructure& s) {
    if (s.n() > kMaxObservables) {
        throw ScaleGuard("structure has " + std::to_string(s.n()) + " observables; enumeration limit is " +
                         std::to_string(kMaxObservables));
    }
    const std::size_t d = s.dimension();
    const std::size_t rows = s.assignment_count();

    std::vector<std::vector<int>> a(rows, std::vector<int>(d));
    for (Mask x = 0; x < rows; ++x) {
        for (std::size_t k = 0; k < d; ++k) a[x][k] = monomial_value(s.monomials()[k], x);
    }

    // Initial simplicial cone from d independent constraints: its rays are the
    // columns of the inverse of those rows.
    detail::EchelonBasis echelon(d);
    std::vector<std::size_t> chosen;
    std::vector<bool> is_chosen(rows, false);
    for (std::size_t x = 0; x < rows && chosen.size() < d; ++x) {
        std::vector<mpq_class> row(a[x].begin(), a[x].end());
        if (echelon.try_add(std::move(row))) {
            chosen.push_back(x);
            is_chosen[x] = true;
        }
    }
    detail::QMatrix basis_rows;
    for (std::size_t x : chosen) basis_rows.emplace_back(a[x].begin(), a[x].end());
    const auto inv = detail::inverse(basis_rows);
    if (!inv) throw Error("enumerate_extremal_rays: monomial rows do not span the basis");

    std::vector<DdRay> rays;
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<mpq_class> col(d);
        for (std::size_t k = 0; k < d; ++k) col[k] = (*inv)[k][j];
        mpz_class lcm = 1;
        for (const auto& c : col) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
        DdRay r{std::vector<mpz_class>(d), boost::dynamic_bitset<>(rows)};
        for (std::size_t k = 0; k < d; ++k) r.v[k] = col[k].get_num() * (lcm / col[k].get_den());
        make_primitive(r.v);
        for (std::size_t i = 0; i < d; ++i) {
            if (i != j) r.zeros.set(chosen[i]);
        }
        rays.push_back(std::move(r));
    }

    for (std::size_t x = 0; x < rows; ++x) {
        if (is_chosen[x]) continue;
        std::vector<mpz_class> val(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<DdRay> next;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = row_dot(a[x], rays[i].v);
            const int sign = sgn(val[i]);
            if (sign > 0) pos.push_back(i);
            if (sign < 0) neg.push_back(i);
        }
        if (neg.empty()) {
            for (std::size_t i = 0; i < rays.size(); ++i) {
                if (sgn(val[i]) == 0) rays[i].zeros.set(x);
            }
            continue;
        }
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (sgn(val[i]) < 0) continue;
            DdRay r = rays[i];
            if (sgn(val[i]) == 0) r.zeros.set(x);
            next.push_back(std::move(r));
        }
        for (std::size_t p : pos) {
            for (std::size_t q : neg) {
                const boost::dynamic_bitset<> common = rays[p].zeros & rays[q].zeros;
                if (common.count() + 2 < d) continue;
                bool adjacent = true;
                for (std::size_t t = 0; t < rays.size() && adjacent; ++t) {
                    if (t == p || t == q) continue;
                    if (common.is_subset_of(rays[t].zeros)) adjacent = false;
                }
                if (!adjacent) continue;
                DdRay r{std::vector<mpz_class>(d), common};
                for (std::size_t k = 0; k < d; ++k) r.v[k] = val[p] * rays[q].v[k] - val[q] * rays[p].v[k];
                make_primitive(r.v);
                r.zeros.set(x);
                next.push_back(std::move(r));
            }
        }
        rays = std::move(next);
    }

    const auto trivial = trivial_rays(s);
    std::vector<RayFunction> out;
    for (const auto& r : rays) {
        RayFunction f{s, {}, RayClass::nontrivial};
        for (const auto& c : r.v) {
            if (!c.fits_slong_p()) throw Error("enumerate_extremal_rays: coefficient exceeds 64 bits");
            f.coeffs.push_back(c.get_si());
        }
        if (std::find(trivial.begin(), trivial.end(), f) != trivial.end()) f.cls = RayClass::trivial;
        out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end(), [](const RayFunction& l, const RayFunction& r) { return l.coeffs < r.coeffs; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace kcbs::hv

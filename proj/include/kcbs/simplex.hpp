#pragma once

// Dense two-phase tableau simplex with Bland's rule, generic over the scalar
// (double or mpq_class). Solves  min c^T x  s.t.  A x = b, x >= 0.

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kcbs::lp {

enum class Status { optimal, infeasible, unbounded };

template <class T>
struct Result {
    Status status = Status::infeasible;
    std::vector<T> x;
    T objective{};
    /// Multipliers pi with c_j - pi^T A_j >= 0 at optimality.
    std::vector<T> duals;
    /// Basic column per row (-1 for a redundant row).
    std::vector<int> basis;
};

namespace detail {

template <class T>
class Tableau {
public:
    Tableau(const std::vector<std::vector<T>>& a, const std::vector<T>& b, const T& eps)
        : m_(a.size()), n_(a.empty() ? 0 : a.front().size()), eps_(eps) {
        cols_ = n_ + m_ + 1;
        t_.assign(m_ * cols_, T(0));
        sign_.assign(m_, 1);
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            if (a[i].size() != n_) throw std::invalid_argument("simplex: ragged constraint matrix");
            if (b[i] < T(0)) sign_[i] = -1;
            for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign_[i] < 0 ? T(-a[i][j]) : a[i][j];
            at(i, n_ + i) = T(1);
            at(i, rhs()) = sign_[i] < 0 ? T(-b[i]) : b[i];
            basis_[i] = static_cast<int>(n_ + i);
        }
    }

    T& at(std::size_t i, std::size_t j) { return t_[i * cols_ + j]; }
    const T& at(std::size_t i, std::size_t j) const { return t_[i * cols_ + j]; }
    std::size_t rhs() const { return cols_ - 1; }

    bool positive(const T& v) const { return v > eps_; }
    bool negative(const T& v) const { return v < T(-eps_); }

    /// Runs the simplex on the current basis with the given column costs.
    /// Only columns < allowed may enter. Returns false on unboundedness.
    bool optimize(const std::vector<T>& cost, std::size_t allowed) {
        std::vector<T> d(cols_ - 1);
        const std::size_t limit = 50 * (cols_ + m_) + 1000;
        for (std::size_t iter = 0; iter < limit; ++iter) {
            reduced_costs(cost, d);
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (negative(d[j])) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return true;
            std::size_t leave = m_;
            T best{};
            for (std::size_t i = 0; i < m_; ++i) {
                if (!positive(at(i, enter))) continue;
                T ratio = at(i, rhs()) / at(i, enter);
                if (leave == m_ || ratio < best || (!(best < ratio) && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = std::move(ratio);
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
        throw std::runtime_error("simplex: iteration limit exceeded");
    }

    void reduced_costs(const std::vector<T>& cost, std::vector<T>& d) const {
        for (std::size_t j = 0; j + 1 < cols_; ++j) {
            T v = cost[j];
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] < 0) continue;
                const T& cb = cost[basis_[i]];
                if (cb != T(0) && at(i, j) != T(0)) v -= cb * at(i, j);
            }
            d[j] = std::move(v);
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const T p = at(row, col);
        for (std::size_t j = 0; j < cols_; ++j) {
            if (at(row, j) != T(0)) at(row, j) /= p;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            const T f = at(i, col);
            if (f == T(0)) continue;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (at(row, j) != T(0)) at(i, j) -= f * at(row, j);
            }
        }
        basis_[row] = static_cast<int>(col);
    }

    std::size_t m_;
    std::size_t n_;
    std::size_t cols_ = 0;
    T eps_;
    std::vector<T> t_;
    std::vector<int> sign_;
    std::vector<int> basis_;
};

}  // namespace detail

/// eps is the comparison slack: 0 for exact scalars, ~1e-11 for doubles.
template <class T>
Result<T> solve(const std::vector<std::vector<T>>& a, const std::vector<T>& b, const std::vector<T>& c,
                const T& eps) {
    detail::Tableau<T> tab(a, b, eps);
    const std::size_t m = tab.m_;
    const std::size_t n = tab.n_;
    Result<T> res;

    // Phase I: minimize the sum of artificials.
    std::vector<T> phase1(n + m, T(0));
    for (std::size_t i = 0; i < m; ++i) phase1[n + i] = T(1);
    tab.optimize(phase1, n);
    T infeas(0);
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis_[i] >= static_cast<int>(n)) infeas += tab.at(i, tab.rhs());
    }
    if (tab.positive(infeas)) {
        res.status = Status::infeasible;
        return res;
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are linearly dependent on the others.
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis_[i] < static_cast<int>(n)) continue;
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (tab.positive(tab.at(i, j)) || tab.negative(tab.at(i, j))) {
                col = j;
                break;
            }
        }
        if (col < n) {
            tab.pivot(i, col);
        } else {
            tab.basis_[i] = -1;
        }
    }

    std::vector<T> phase2(n + m, T(0));
    for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
    if (!tab.optimize(phase2, n)) {
        res.status = Status::unbounded;
        return res;
    }

    res.status = Status::optimal;
    res.x.assign(n, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis_[i] >= 0 && tab.basis_[i] < static_cast<int>(n)) res.x[tab.basis_[i]] = tab.at(i, tab.rhs());
    }
    res.objective = T(0);
    for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];

    // pi^T = c_B^T B^{-1}; B^{-1} sits in the artificial block of the tableau.
    res.duals.assign(m, T(0));
    for (std::size_t r = 0; r < m; ++r) {
        T v(0);
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis_[i] < 0 || tab.basis_[i] >= static_cast<int>(n)) continue;
            v += c[tab.basis_[i]] * tab.at(i, n + r);
        }
        res.duals[r] = tab.sign_[r] < 0 ? T(-v) : v;
    }
    res.basis = tab.basis_;
    return res;
}

}  // namespace kcbs::lp

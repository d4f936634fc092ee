#pragma once

// Small exact Gauss-Jordan helpers over GMP rationals.

#include <optional>
#include <vector>

#include <gmpxx.h>

namespace kcbs::detail {

using QMatrix = std::vector<std::vector<mpq_class>>;

/// Solves A x = b for square A; nullopt when A is singular.
inline std::optional<std::vector<mpq_class>> solve_square(QMatrix a, std::vector<mpq_class> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && sgn(a[piv][col]) == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        const mpq_class p = a[col][col];
        for (std::size_t j = col; j < n; ++j) a[col][j] /= p;
        b[col] /= p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || sgn(a[i][col]) == 0) continue;
            const mpq_class f = a[i][col];
            for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
            b[i] -= f * b[col];
        }
    }
    return b;
}

/// Inverse of a square matrix; nullopt when singular.
inline std::optional<QMatrix> inverse(QMatrix a) {
    const std::size_t n = a.size();
    QMatrix inv(n, std::vector<mpq_class>(n, mpq_class(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && sgn(a[piv][col]) == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const mpq_class p = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || sgn(a[i][col]) == 0) continue;
            const mpq_class f = a[i][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[col][j];
                inv[i][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

/// Incremental row-echelon basis used to pick linearly independent rows.
class EchelonBasis {
public:
    explicit EchelonBasis(std::size_t dim) : dim_(dim) {}

    /// Adds the row if it is independent of those already added.
    bool try_add(std::vector<mpq_class> row) {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const std::size_t p = pivots_[k];
            if (sgn(row[p]) == 0) continue;
            const mpq_class f = row[p] / rows_[k][p];
            for (std::size_t j = 0; j < dim_; ++j) row[j] -= f * rows_[k][j];
        }
        for (std::size_t j = 0; j < dim_; ++j) {
            if (sgn(row[j]) != 0) {
                rows_.push_back(std::move(row));
                pivots_.push_back(j);
                return true;
            }
        }
        return false;
    }

    std::size_t rank() const { return rows_.size(); }

private:
    std::size_t dim_;
    QMatrix rows_;
    std::vector<std::size_t> pivots_;
};

}  // namespace kcbs::detail

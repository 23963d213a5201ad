#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "zerofiber/rational.hpp"

namespace zerofiber {

/// Dense row-major matrix over the rationals. Sizes here are tiny (one row
/// per fiber component), so no attempt is made at sparsity.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    RationalVector operator*(const RationalVector& x) const {
        RationalVector y(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) y[r] += (*this)(r, c) * x[c];
        return y;
    }

    /// Principal submatrix on `idx` (rows and columns).
    Matrix principal(const std::vector<std::size_t>& idx) const {
        Matrix m(idx.size(), idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < idx.size(); ++c) m(r, c) = (*this)(idx[r], idx[c]);
        return m;
    }

    bool operator==(const Matrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    RationalVector data_;
};

/// Solves a square system exactly by Gaussian elimination with nonzero
/// pivoting. Returns nullopt when the matrix is singular.
inline std::optional<RationalVector> solve(Matrix a, RationalVector b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw StructuralError("solve: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a(piv, col) == 0) ++piv;
        if (piv == n) return std::nullopt;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a(r, col) == 0) continue;
            Rational f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    RationalVector x(n);
    for (std::size_t r = n; r-- > 0;) {
        Rational acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
        x[r] = acc / a(r, r);
    }
    return x;
}

struct Inertia {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t zero = 0;
    bool operator==(const Inertia&) const = default;
};

/// Inertia of a symmetric matrix by symmetric elimination (Sylvester's law).
/// Uses a 1x1 pivot when some diagonal entry is nonzero and a 2x2 block
/// [[0,x],[x,0]] (one positive, one negative eigenvalue) otherwise.
inline Inertia inertia(const Matrix& sym) {
    const std::size_t n = sym.rows();
    if (sym.cols() != n) throw StructuralError("inertia: matrix not square");
    std::vector<RationalVector> m(n, RationalVector(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m[r][c] = sym(r, c);

    Inertia out;
    auto drop = [&m](std::vector<std::size_t> idx) {
        std::sort(idx.rbegin(), idx.rend());
        for (auto k : idx) {
            m.erase(m.begin() + static_cast<std::ptrdiff_t>(k));
            for (auto& row : m) row.erase(row.begin() + static_cast<std::ptrdiff_t>(k));
        }
    };
    while (!m.empty()) {
        const std::size_t sz = m.size();
        std::size_t piv = sz;
        for (std::size_t k = 0; k < sz; ++k)
            if (m[k][k] != 0) { piv = k; break; }
        if (piv < sz) {
            Rational p = m[piv][piv];
            (p > 0 ? out.positive : out.negative) += 1;
            for (std::size_t r = 0; r < sz; ++r) {
                if (r == piv || m[r][piv] == 0) continue;
                Rational f = m[r][piv] / p;
                for (std::size_t c = 0; c < sz; ++c) m[r][c] -= f * m[piv][c];
            }
            drop({piv});
            continue;
        }
        std::size_t pi = sz, pj = sz;
        for (std::size_t r = 0; r < sz && pi == sz; ++r)
            for (std::size_t c = r + 1; c < sz; ++c)
                if (m[r][c] != 0) { pi = r; pj = c; break; }
        if (pi == sz) {
            out.zero += sz;
            break;
        }
        // Schur complement of the block C = [[0,x],[x,0]]; C^{-1} = [[0,1/x],[1/x,0]].
        Rational x = m[pi][pj];
        out.positive += 1;
        out.negative += 1;
        std::vector<RationalVector> next = m;
        for (std::size_t r = 0; r < sz; ++r) {
            if (r == pi || r == pj) continue;
            for (std::size_t c = 0; c < sz; ++c) {
                if (c == pi || c == pj) continue;
                next[r][c] -= (m[r][pi] * m[pj][c] + m[r][pj] * m[pi][c]) / x;
            }
        }
        m = std::move(next);
        drop({pi, pj});
    }
    return out;
}

inline bool is_negative_definite(const Matrix& sym) {
    auto in = inertia(sym);
    return in.negative == sym.rows();
}

}  // namespace zerofiber

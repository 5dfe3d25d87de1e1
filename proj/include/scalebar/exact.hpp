#pragma once

// Exact linear algebra: fraction-free elimination and a rational simplex.

#include "rational.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace scalebar {

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // row-major
using IntegerMatrix = std::vector<std::vector<BigInt>>;

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot of vectors with different lengths");
    Rational s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// Scales every row by the lcm of its denominators.
inline IntegerMatrix clear_row_denominators(const RationalMatrix& a) {
    IntegerMatrix out;
    out.reserve(a.size());
    for (const auto& row : a) {
        BigInt l = 1;
        for (const auto& x : row) l = boost::multiprecision::lcm(l, denominator_of(x));
        std::vector<BigInt> r;
        r.reserve(row.size());
        for (const auto& x : row) r.push_back(numerator_of(x) * (l / denominator_of(x)));
        out.push_back(std::move(r));
    }
    return out;
}

struct LinearSolve {
    bool consistent = false;
    RationalVector solution;  // free variables set to zero
    std::size_t rank = 0;
};

// Solves A x = b (last column of `aug`) by Bareiss elimination; every
// intermediate entry is an integer minor, so divisions are exact.
inline LinearSolve bareiss_solve(IntegerMatrix aug) {
    LinearSolve res;
    const std::size_t m = aug.size();
    if (m == 0) throw std::invalid_argument("empty system");
    const std::size_t cols = aug.front().size();
    const std::size_t k = cols - 1;
    std::vector<std::size_t> pivots;
    BigInt prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < k && r < m; ++c) {
        std::size_t p = r;
        while (p < m && aug[p][c] == 0) ++p;
        if (p == m) continue;
        std::swap(aug[p], aug[r]);
        for (std::size_t i = r + 1; i < m; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                BigInt num = aug[r][c] * aug[i][j] - aug[i][c] * aug[r][j];
                if (num % prev != 0) throw std::logic_error("fraction-free elimination lost exactness");
                aug[i][j] = num / prev;
            }
            aug[i][c] = 0;
        }
        prev = aug[r][c];
        pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    for (std::size_t i = r; i < m; ++i)
        if (aug[i][k] != 0) return res;
    res.consistent = true;
    res.solution.assign(k, Rational(0));
    for (std::size_t t = r; t-- > 0;) {
        std::size_t c = pivots[t];
        Rational s(aug[t][k]);
        for (std::size_t j = c + 1; j < k; ++j)
            if (aug[t][j] != 0) s -= Rational(aug[t][j]) * res.solution[j];
        res.solution[c] = s / Rational(aug[t][c]);
    }
    return res;
}

struct FeasibilityResult {
    bool feasible = false;
    RationalVector x;     // when feasible: A x = b, x >= 0
    RationalVector dual;  // when infeasible: y with y^T A <= 0 and y^T b > 0
    std::size_t pivots = 0;
};

// Phase-one simplex with Bland's rule for {A x = b, x >= 0} over the rationals.
inline FeasibilityResult simplex_feasibility(RationalMatrix A, RationalVector b) {
    const std::size_t m = A.size();
    if (m == 0 || b.size() != m) throw std::invalid_argument("simplex: malformed system");
    const std::size_t k = A.front().size();
    for (std::size_t i = 0; i < m; ++i)
        if (b[i] < 0) {
            for (auto& x : A[i]) x = -x;
            b[i] = -b[i];
        }
    // Columns: k structural, m artificial, then rhs.  Row m holds reduced costs.
    const std::size_t cols = k + m + 1, rhs = k + m;
    RationalMatrix T(m + 1, RationalVector(cols, Rational(0)));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) T[i][j] = A[i][j];
        T[i][k + i] = 1;
        T[i][rhs] = b[i];
        basis[i] = k + i;
        for (std::size_t j = 0; j < k; ++j) T[m][j] -= A[i][j];
        T[m][rhs] -= b[i];
    }
    FeasibilityResult res;
    while (true) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < k + m; ++j)
            if (T[m][j] < 0) { enter = j; break; }
        if (enter == cols) break;
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (T[i][enter] <= 0) continue;
            Rational ratio = T[i][rhs] / T[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) throw std::logic_error("phase-one simplex cannot be unbounded");
        Rational piv = T[leave][enter];
        for (auto& x : T[leave]) x /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || T[i][enter] == 0) continue;
            Rational f = T[i][enter];
            for (std::size_t j = 0; j < cols; ++j)
                if (T[leave][j] != 0) T[i][j] -= f * T[leave][j];
        }
        basis[leave] = enter;
        ++res.pivots;
    }
    // Objective value is -T[m][rhs].
    if (T[m][rhs] == 0) {
        res.feasible = true;
        res.x.assign(k, Rational(0));
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < k) res.x[basis[i]] = T[i][rhs];
    } else {
        // Reduced cost of artificial i is 1 - y_i.
        res.dual.resize(m);
        for (std::size_t i = 0; i < m; ++i) res.dual[i] = 1 - T[m][k + i];
    }
    return res;
}

// Dense rational Gaussian elimination for a square system; nullopt if singular.
inline std::optional<RationalVector> solve_square(RationalMatrix a, RationalVector b) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return std::nullopt;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    RationalVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rational s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace scalebar

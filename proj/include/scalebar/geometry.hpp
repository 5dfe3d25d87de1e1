#pragma once

// Convex geometry of weight sets: min-norm points (Wolfe), exact affine and
// convex membership of the origin, brute-force margins, affine distances and
// smallest singular values.

#include "exact.hpp"
#include "weights.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scalebar {

// Points of a weight set as the columns of a dense matrix.
inline Eigen::MatrixXd to_columns(const WeightSet& ws) {
    Eigen::MatrixXd X(ws.dims().length(), ws.size());
    for (std::size_t k = 0; k < ws.size(); ++k) {
        auto v = ws[k].to_doubles();
        for (std::size_t i = 0; i < v.size(); ++i) X(i, k) = v[i];
    }
    return X;
}

// Points of a weight set as exact rows.
inline RationalMatrix to_rational_rows(const WeightSet& ws) {
    RationalMatrix out;
    out.reserve(ws.size());
    for (const auto& w : ws.elements()) out.push_back(w.coords());
    return out;
}

// ------------------------------------------------------- exact min-norm point

struct ExactMinNormResult {
    RationalVector point;
    Rational distance2;         // exact squared distance
    RationalVector coefficients;
    bool zero_in_hull = false;  // distance2 == 0
    std::size_t iterations = 0;
    double distance() const { return std::sqrt(to_double(distance2)); }
};

struct CorralStart {
    std::vector<std::size_t> corral;
    RationalVector weights;  // positive, summing to 1
};

// Wolfe's method in exact arithmetic; terminates since |x| strictly decreases
// between major cycles.  Points are rows.  A warm start supplies an initial
// corral whose weights seed the first minor cycle.
inline ExactMinNormResult min_norm_point_exact(const RationalMatrix& P,
                                               const std::optional<CorralStart>& warm = std::nullopt) {
    if (P.empty()) throw std::invalid_argument("min_norm_point_exact requires at least one point");
    const std::size_t k = P.size(), D = P.front().size();
    RationalMatrix G(k, RationalVector(k));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) G[a][b] = G[b][a] = dot(P[a], P[b]);

    ExactMinNormResult r;
    std::size_t j0 = 0;
    for (std::size_t a = 1; a < k; ++a)
        if (G[a][a] < G[j0][j0]) j0 = a;
    std::vector<std::size_t> S{j0};
    RationalVector lam{Rational(1)};
    bool minor_first = false;
    if (warm && !warm->corral.empty()) {
        S = warm->corral;
        lam = warm->weights;
        minor_first = true;
    }

    auto gram_x = [&](std::size_t j) {  // x . P_j with x = sum lam_i P_{S_i}
        Rational s = 0;
        for (std::size_t i = 0; i < S.size(); ++i) s += lam[i] * G[S[i]][j];
        return s;
    };

    while (true) {
        ++r.iterations;
        if (!minor_first) {
            Rational xx = 0;
            for (std::size_t i = 0; i < S.size(); ++i) xx += lam[i] * gram_x(S[i]);
            if (xx == 0) break;
            std::size_t j = k;
            Rational gj;
            for (std::size_t a = 0; a < k; ++a) {
                Rational g = gram_x(a);
                if (j == k || g < gj) { j = a; gj = g; }
            }
            if (xx - gj <= 0) break;
            S.push_back(j);
            lam.push_back(Rational(0));
        }
        minor_first = false;
        while (true) {
            const std::size_t s = S.size();
            RationalMatrix K(s + 1, RationalVector(s + 1, Rational(0)));
            RationalVector rhs(s + 1, Rational(0));
            for (std::size_t a = 0; a < s; ++a) {
                for (std::size_t b = 0; b < s; ++b) K[a][b] = G[S[a]][S[b]];
                K[a][s] = 1;
                K[s][a] = 1;
            }
            rhs[s] = 1;
            auto sol = solve_square(K, rhs);
            if (!sol) {
                if (warm) return min_norm_point_exact(P);  // warm corral was not affinely independent
                throw std::logic_error("exact Wolfe corral became affinely dependent");
            }
            RationalVector alpha(sol->begin(), sol->begin() + s);
            bool positive = std::all_of(alpha.begin(), alpha.end(), [](const Rational& a) { return a > 0; });
            if (positive) {
                lam = alpha;
                break;
            }
            ++r.iterations;
            Rational theta = 1;
            for (std::size_t i = 0; i < s; ++i)
                if (alpha[i] <= 0) {
                    Rational t = lam[i] / (lam[i] - alpha[i]);
                    if (t < theta) theta = t;
                }
            std::vector<std::size_t> S2;
            RationalVector l2;
            for (std::size_t i = 0; i < s; ++i) {
                Rational v = theta * alpha[i] + (1 - theta) * lam[i];
                if (v > 0) { S2.push_back(S[i]); l2.push_back(v); }
            }
            S = std::move(S2);
            lam = std::move(l2);
        }
    }
    r.coefficients.assign(k, Rational(0));
    r.point.assign(D, Rational(0));
    for (std::size_t i = 0; i < S.size(); ++i) {
        r.coefficients[S[i]] = lam[i];
        for (std::size_t c = 0; c < D; ++c) r.point[c] += lam[i] * P[S[i]][c];
    }
    r.distance2 = dot(r.point, r.point);
    r.zero_in_hull = r.distance2 == 0;
    return r;
}

inline ExactMinNormResult min_norm_point_exact(const WeightSet& ws) { return min_norm_point_exact(to_rational_rows(ws)); }

// ------------------------------------------------------------ min-norm point

struct MinNormOptions {
    double tol = 1e-10;             // accuracy of the returned distance
    double anti_cycle = 1e-12;      // affine coefficients below this are treated as zero
    std::size_t max_iter = 100000;  // major plus minor cycles
    bool exact_polish = false;      // re-run exact Wolfe from the final corral (weight sets only)
};

struct MinNormResult {
    Eigen::VectorXd point;
    double distance = 0.0;
    Eigen::VectorXd coefficients;  // convex weights over the input columns
    bool zero_in_hull = false;     // certificate kind: distance <= tol
    Eigen::VectorXd separator;     // h with h . x >= margin for every input x
    double margin = 0.0;
    double gap_bound = 0.0;        // upper bound on distance - dist(0, conv)
    std::size_t iterations = 0;
    bool converged = false;
    bool used_fallback = false;
    bool at_precision_floor = false;        // stopped because rounding noise exceeds the gap
    std::optional<ExactMinNormResult> exact;  // set by exact polishing
};

namespace detail {

struct AffineSolve {
    bool ok = false;
    Eigen::VectorXd alpha;
};

// argmin |X_S alpha| subject to sum(alpha) = 1, by least squares on differences.
inline AffineSolve affine_minimizer(const Eigen::MatrixXd& X, const std::vector<std::size_t>& S) {
    AffineSolve out;
    const std::size_t s = S.size();
    out.alpha = Eigen::VectorXd::Ones(1);
    if (s == 1) {
        out.ok = true;
        return out;
    }
    Eigen::MatrixXd D(X.rows(), s - 1);
    for (std::size_t i = 1; i < s; ++i) D.col(i - 1) = X.col(S[i]) - X.col(S[0]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    qr.setThreshold(1e-13);
    if (static_cast<std::size_t>(qr.rank()) < s - 1) return out;
    Eigen::VectorXd beta = qr.solve(-X.col(S[0]));
    out.alpha.resize(s);
    out.alpha(0) = 1.0 - beta.sum();
    out.alpha.tail(s - 1) = beta;
    out.ok = true;
    return out;
}

inline void finish_certificate(const Eigen::MatrixXd& X, MinNormResult& r, double tol) {
    r.distance = r.point.norm();
    Eigen::VectorXd g = X.transpose() * r.point;
    double gmin = g.minCoeff();
    r.gap_bound = r.distance > 0 ? std::max(0.0, (r.distance * r.distance - gmin) / r.distance) : 0.0;
    r.zero_in_hull = r.distance <= tol;
    if (!r.zero_in_hull) {
        r.separator = r.point;
        r.margin = gmin;
    } else {
        r.separator = Eigen::VectorXd::Zero(X.rows());
        r.margin = 0.0;
    }
}

// Away-step Frank-Wolfe with exact line search on |x|^2, from weights lam.
inline void away_step_frank_wolfe(const Eigen::MatrixXd& X, Eigen::VectorXd& lam, const MinNormOptions& opt,
                                  MinNormResult& r) {
    Eigen::VectorXd x = X * lam;
    for (std::size_t it = 0; it < opt.max_iter; ++it, ++r.iterations) {
        Eigen::VectorXd g = X.transpose() * x;
        Eigen::Index s;
        double gs = g.minCoeff(&s);
        double xx = x.squaredNorm();
        if (std::sqrt(xx) <= opt.tol || xx - gs <= opt.tol * std::sqrt(xx)) {
            r.converged = true;
            break;
        }
        Eigen::Index v = -1;
        double gv = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < lam.size(); ++k)
            if (lam(k) > 0 && g(k) > gv) { gv = g(k); v = k; }
        Eigen::VectorXd dir;
        double gmax;
        bool away = (gv - xx) > (xx - gs) && v >= 0 && lam(v) < 1.0;
        if (away) {
            dir = x - X.col(v);
            gmax = lam(v) / (1.0 - lam(v));
        } else {
            dir = X.col(s) - x;
            gmax = 1.0;
        }
        double dd = dir.squaredNorm();
        if (dd == 0.0) break;
        double step = std::clamp(-x.dot(dir) / dd, 0.0, gmax);
        if (away) {
            lam *= (1.0 + step);
            lam(v) -= step;
        } else {
            lam *= (1.0 - step);
            lam(s) += step;
        }
        lam = lam.cwiseMax(0.0);
        lam /= lam.sum();
        x = X * lam;
    }
    r.point = x;
    r.coefficients = lam;
}

}  // namespace detail

// Wolfe's method for the point of conv(columns of X) closest to the origin.
inline MinNormResult min_norm_point(const Eigen::MatrixXd& X, const MinNormOptions& opt = {}) {
    if (X.cols() == 0) throw std::invalid_argument("min_norm_point requires at least one point");
    if (!X.allFinite()) throw std::domain_error("min_norm_point: non-finite input");
    if (!(opt.tol > 0)) throw std::invalid_argument("min_norm_point requires tol > 0");
    const std::size_t k = X.cols();
    MinNormResult r;

    Eigen::Index j0;
    X.colwise().squaredNorm().minCoeff(&j0);
    std::vector<std::size_t> S{static_cast<std::size_t>(j0)};
    Eigen::VectorXd lam = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd x = X.col(j0);

    auto full_weights = [&]() {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
        for (std::size_t i = 0; i < S.size(); ++i) w(S[i]) = lam(i);
        return w;
    };

    const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * X.colwise().squaredNorm().maxCoeff();
    bool degenerate = false;
    while (r.iterations < opt.max_iter) {
        ++r.iterations;
        Eigen::VectorXd g = X.transpose() * x;
        Eigen::Index j;
        double gj = g.minCoeff(&j);
        double xx = x.squaredNorm();
        if (std::sqrt(xx) <= opt.tol || xx - gj <= opt.tol * std::sqrt(xx)) {
            r.converged = true;
            break;
        }
        if (std::find(S.begin(), S.end(), static_cast<std::size_t>(j)) != S.end()) {
            // The corral is optimal up to rounding of the affine solve.
            r.at_precision_floor = true;
            r.converged = xx - gj <= noise_floor;
            if (!r.converged) degenerate = true;
            break;
        }
        S.push_back(j);
        lam.conservativeResize(S.size());
        lam(S.size() - 1) = 0.0;

        while (r.iterations < opt.max_iter) {
            auto aff = detail::affine_minimizer(X, S);
            if (!aff.ok) {
                degenerate = true;
                break;
            }
            if ((aff.alpha.array() > opt.anti_cycle).all()) {
                lam = aff.alpha;
                break;
            }
            ++r.iterations;
            double theta = 1.0;
            std::size_t drop = 0;
            for (std::size_t i = 0; i < S.size(); ++i)
                if (aff.alpha(i) <= opt.anti_cycle) {
                    double denom = lam(i) - aff.alpha(i);
                    double t = denom > 0 ? lam(i) / denom : 0.0;
                    if (t < theta) { theta = t; drop = i; }
                }
            lam = theta * aff.alpha + (1.0 - theta) * lam;
            lam(drop) = 0.0;
            std::vector<std::size_t> S2;
            std::vector<double> l2;
            for (std::size_t i = 0; i < S.size(); ++i)
                if (lam(i) > opt.anti_cycle) { S2.push_back(S[i]); l2.push_back(lam(i)); }
            S = S2;
            lam = Eigen::Map<Eigen::VectorXd>(l2.data(), l2.size());
            lam /= lam.sum();
        }
        if (degenerate) break;
        x = Eigen::VectorXd::Zero(X.rows());
        for (std::size_t i = 0; i < S.size(); ++i) x += lam(i) * X.col(S[i]);
    }

    if (degenerate) {
        r.used_fallback = true;
        Eigen::VectorXd w = full_weights();
        detail::away_step_frank_wolfe(X, w, opt, r);
    } else {
        r.point = x;
        r.coefficients = full_weights();
    }
    detail::finish_certificate(X, r, opt.tol);
    return r;
}

inline MinNormResult min_norm_point(const WeightSet& ws, const MinNormOptions& opt = {}) {
    const Eigen::MatrixXd X = to_columns(ws);
    MinNormResult r = min_norm_point(X, opt);
    if (!opt.exact_polish) return r;
    CorralStart warm;
    for (Eigen::Index i = 0; i < r.coefficients.size(); ++i)
        if (r.coefficients(i) > 0) {
            warm.corral.push_back(static_cast<std::size_t>(i));
            warm.weights.push_back(from_double(r.coefficients(i)));
        }
    Rational total = 0;
    for (const auto& w : warm.weights) total += w;
    for (auto& w : warm.weights) w /= total;
    ExactMinNormResult e = min_norm_point_exact(to_rational_rows(ws), warm);
    r.point.resize(e.point.size());
    for (std::size_t i = 0; i < e.point.size(); ++i) r.point(i) = to_double(e.point[i]);
    r.coefficients.resize(e.coefficients.size());
    for (std::size_t i = 0; i < e.coefficients.size(); ++i) r.coefficients(i) = to_double(e.coefficients[i]);
    r.iterations += e.iterations;
    r.converged = true;
    detail::finish_certificate(X, r, opt.tol);
    r.distance = e.distance();
    r.gap_bound = 0.0;
    r.exact = std::move(e);
    return r;
}

// Exact min h . x over the set for a floating separator h (exact in its dyadic value).
inline Rational exact_separation(const Eigen::VectorXd& h, const WeightSet& ws) {
    if (static_cast<int>(h.size()) != ws.dims().length()) throw std::invalid_argument("separator length mismatch");
    RationalVector hr(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) hr[i] = from_double(h(i));
    std::optional<Rational> best;
    for (const auto& w : ws.elements()) {
        Rational s = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w.scaled()[i] != 0) s += hr[i] * w.scaled()[i];
        s /= ws.dims().n;
        if (!best || s < *best) best = s;
    }
    return best.value_or(Rational(0));
}

// --------------------------------------------------------- exact membership

struct AffineMembership {
    bool member = false;
    RationalVector coefficients;  // affine weights (sum 1) with sum lam_i x_i = 0
    std::size_t rank = 0;         // rank of [points; 1^T]
};

namespace detail {
// [x_1 ... x_k ; 1 ... 1 | (0, ..., 0, 1)] with integer rows.
inline IntegerMatrix hull_system(const RationalMatrix& rows) {
    const std::size_t k = rows.size(), D = rows.front().size();
    RationalMatrix A(D + 1, RationalVector(k + 1, Rational(0)));
    for (std::size_t c = 0; c < D; ++c)
        for (std::size_t j = 0; j < k; ++j) A[c][j] = rows[j][c];
    for (std::size_t j = 0; j < k; ++j) A[D][j] = 1;
    A[D][k] = 1;
    return clear_row_denominators(A);
}
}  // namespace detail

inline AffineMembership in_affine_hull_zero(const RationalMatrix& points) {
    if (points.empty()) throw std::invalid_argument("in_affine_hull_zero requires points");
    auto sol = bareiss_solve(detail::hull_system(points));
    AffineMembership m;
    m.member = sol.consistent;
    m.rank = sol.rank;
    if (m.member) m.coefficients = sol.solution;
    return m;
}

inline AffineMembership in_affine_hull_zero(const WeightSet& ws) { return in_affine_hull_zero(to_rational_rows(ws)); }

struct ConvexMembership {
    bool member = false;
    RationalVector coefficients;  // convex weights when member
    RationalVector separator;     // h with h . x_i >= separation > 0 otherwise
    Rational separation;
};

inline ConvexMembership in_convex_hull_zero(const RationalMatrix& points) {
    if (points.empty()) throw std::invalid_argument("in_convex_hull_zero requires points");
    const std::size_t k = points.size(), D = points.front().size();
    IntegerMatrix sys = detail::hull_system(points);
    RationalMatrix A(D + 1, RationalVector(k));
    RationalVector b(D + 1);
    for (std::size_t i = 0; i <= D; ++i) {
        for (std::size_t j = 0; j < k; ++j) A[i][j] = Rational(sys[i][j]);
        b[i] = Rational(sys[i][k]);
    }
    auto f = simplex_feasibility(A, b);
    ConvexMembership m;
    m.member = f.feasible;
    if (f.feasible) {
        m.coefficients = f.x;
        return m;
    }
    // y^T A <= 0 and y^T b > 0 give h = -(y_c * row scale) with h . x_j >= y_D.
    m.separator.assign(D, Rational(0));
    for (std::size_t c = 0; c < D; ++c) {
        Rational scale = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (points[j][c] != 0) {
                scale = Rational(sys[c][j]) / points[j][c];
                break;
            }
        m.separator[c] = -f.dual[c] * scale;
    }
    std::optional<Rational> best;
    for (const auto& x : points) {
        Rational s = dot(m.separator, x);
        if (!best || s < *best) best = s;
    }
    m.separation = *best;
    if (m.separation <= 0) throw std::logic_error("simplex dual failed to separate");
    return m;
}

inline ConvexMembership in_convex_hull_zero(const WeightSet& ws) { return in_convex_hull_zero(to_rational_rows(ws)); }

// ------------------------------------------------------------ margins

struct MarginResult {
    Rational margin2;  // exact squared margin
    std::uint64_t subset_mask = 0;
    std::vector<std::size_t> subset;
    double margin() const { return std::sqrt(to_double(margin2)); }
};

// min over subsets S with 0 outside conv(S) of dist(0, conv(S)).
inline MarginResult margin_bruteforce(const WeightSet& ws, std::size_t cap = 20) {
    if (ws.empty()) throw std::invalid_argument("margin_bruteforce requires a nonempty set");
    if (ws.size() > cap || ws.size() > 62)
        throw std::length_error("margin_bruteforce: " + std::to_string(ws.size()) + " points exceed the subset cap");
    RationalMatrix P = to_rational_rows(ws);
    const std::uint64_t total = std::uint64_t(1) << ws.size();
    MarginResult best;
    bool found = false;
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        RationalMatrix sub;
        for (std::size_t k = 0; k < ws.size(); ++k)
            if (mask >> k & 1) sub.push_back(P[k]);
        auto r = min_norm_point_exact(sub);
        if (r.zero_in_hull) continue;
        if (!found || r.distance2 < best.margin2) {
            best.margin2 = r.distance2;
            best.subset_mask = mask;
            found = true;
        }
    }
    if (!found) throw std::domain_error("every subset contains 0 in its hull");
    for (std::size_t k = 0; k < ws.size(); ++k)
        if (best.subset_mask >> k & 1) best.subset.push_back(k);
    return best;
}

// ------------------------------------------------------------ affine hulls

struct AffineDistance {
    double distance = 0.0;
    Eigen::VectorXd foot;
};

// Distance from target to aff(columns of X); rank deficiency resolved by the
// minimum-norm least-squares solution.
inline AffineDistance dist_to_affine_hull(const Eigen::VectorXd& target, const Eigen::MatrixXd& X) {
    if (X.cols() == 0) throw std::invalid_argument("dist_to_affine_hull requires points");
    AffineDistance r;
    Eigen::VectorXd base = X.col(0);
    if (X.cols() == 1) {
        r.foot = base;
    } else {
        Eigen::MatrixXd D = X.rightCols(X.cols() - 1).colwise() - base;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(D);
        Eigen::VectorXd beta = cod.solve(target - base);
        r.foot = base + D * beta;
    }
    r.distance = (target - r.foot).norm();
    return r;
}

// ------------------------------------------------------------ singular values

struct SingularValueSummary {
    double sigma_min_nonzero = 0.0;
    std::size_t zero_count = 0;
    Eigen::VectorXd singular_values;  // ascending, one per column of M
};

// Square roots of the eigenvalues of M^T M; values <= zero_tol count as zero.
// A negative zero_tol selects 1e-6 * sigma_max.
inline SingularValueSummary smallest_nonzero_singular_value(const Eigen::MatrixXd& M, double zero_tol = -1.0) {
    if (!M.allFinite()) throw std::domain_error("singular values of a non-finite matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.transpose() * M, Eigen::EigenvaluesOnly);
    SingularValueSummary s;
    s.singular_values = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    double smax = s.singular_values.size() ? s.singular_values.maxCoeff() : 0.0;
    if (zero_tol < 0) zero_tol = 1e-6 * std::max(smax, 1e-300);
    bool have = false;
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
        double v = s.singular_values(i);
        if (v <= zero_tol) ++s.zero_count;
        else if (!have || v < s.sigma_min_nonzero) {
            s.sigma_min_nonzero = v;
            have = true;
        }
    }
    return s;
}

}  // namespace scalebar

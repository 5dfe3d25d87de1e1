#include <scalebar/scalebar.hpp>

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <random>

using namespace scalebar;

namespace {

// Rational Gauss-Jordan solve of a square system; empty when singular.
std::optional<RationalVector> oracle_solve(RationalMatrix A, RationalVector b) {
    const std::size_t n = A.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && A[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || A[r][c] == 0) continue;
            Rational f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    RationalVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return x;
}

Rational rdot(const RationalVector& a, const RationalVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Exact squared distance from 0 to conv(P): over all subsets S, the affine
// minimizer with positive weights that satisfies x . p >= |x|^2 for all p.
Rational oracle_min_norm2(const RationalMatrix& P) {
    const std::size_t k = P.size();
    std::optional<Rational> best;
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << k); ++mask) {
        std::vector<std::size_t> S;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) S.push_back(i);
        const std::size_t s = S.size();
        // [G 1; 1^T 0] [lam; -mu] = [0; 1]
        RationalMatrix A(s + 1, RationalVector(s + 1, Rational(0)));
        RationalVector b(s + 1, Rational(0));
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t j = 0; j < s; ++j) A[i][j] = rdot(P[S[i]], P[S[j]]);
            A[i][s] = 1;
            A[s][i] = 1;
        }
        b[s] = 1;
        auto sol = oracle_solve(A, b);
        if (!sol) continue;
        bool positive = true;
        for (std::size_t i = 0; i < s; ++i) positive = positive && (*sol)[i] > 0;
        if (!positive) continue;
        RationalVector x(P.front().size(), Rational(0));
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t c = 0; c < x.size(); ++c) x[c] += (*sol)[i] * P[S[i]][c];
        Rational xx = rdot(x, x);
        bool optimal = true;
        for (const auto& p : P) optimal = optimal && rdot(x, p) >= xx;
        if (optimal && (!best || xx < *best)) best = xx;
    }
    return *best;
}

Eigen::MatrixXd cols(std::initializer_list<std::vector<double>> pts) {
    std::vector<std::vector<double>> v(pts);
    Eigen::MatrixXd X(v.front().size(), v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < v[j].size(); ++i) X(i, j) = v[j][i];
    return X;
}

MinNormOptions exact_opts() {
    MinNormOptions o;
    o.tol = 1e-12;
    o.exact_polish = true;
    return o;
}

}  // namespace

// ------------------------------------------------------------ min-norm point

TEST(MinNorm, Examples) {
    auto a = min_norm_point(cols({{3, 4}}));
    EXPECT_NEAR(a.distance, 5.0, 1e-12);
    EXPECT_NEAR(a.point(0), 3.0, 1e-12);
    auto b = min_norm_point(cols({{1, 0}, {0, 1}}));
    EXPECT_NEAR(b.point(0), 0.5, 1e-12);
    EXPECT_NEAR(b.point(1), 0.5, 1e-12);
    EXPECT_NEAR(b.distance, std::sqrt(0.5), 1e-12);
    auto c = min_norm_point(gamma_qubit(3));
    EXPECT_NEAR(c.distance, 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(MinNorm, ExactDistancesMatchOracle) {
    struct Case {
        std::string name;
        WeightSet ws;
        Rational frozen;
    };
    std::vector<Case> cases = {
        {"gamma3(3)", gamma_3(3), make_rational(1, 78)},    {"gamma3(4)", gamma_3(4), make_rational(1, 740)},
        {"qubit(3)", gamma_qubit(3), make_rational(1, 2)},  {"qubit(4)", gamma_qubit(4), make_rational(1, 14)},
        {"qubit(5)", gamma_qubit(5), make_rational(1, 13)}, {"qubit(6)", gamma_qubit(6), make_rational(1, 70)},
        {"gamma4(3)", gamma_4(3), make_rational(1, 57)},    {"stacked(3,2)", gamma_stacked(3, 2), make_rational(17, 54066)},
    };
    for (const auto& c : cases) {
        Rational oracle = oracle_min_norm2(to_rational_rows(c.ws));
        EXPECT_EQ(oracle, c.frozen) << c.name;
        auto res = min_norm_point(c.ws, exact_opts());
        ASSERT_TRUE(res.exact.has_value());
        EXPECT_EQ(res.exact->distance2, c.frozen) << c.name;
        EXPECT_EQ(min_norm_point_exact(c.ws).distance2, c.frozen) << c.name;
        EXPECT_NEAR(min_norm_point(c.ws).distance, std::sqrt(to_double(c.frozen)), 1e-10) << c.name;
    }
}

TEST(MinNorm, LargerExactDistances) {
    // frozen from the exact Wolfe run, cross-checked against the subset oracle up to the sizes it can reach
    EXPECT_EQ(min_norm_point_exact(gamma_3(5)).distance2, make_rational(1, 5720));
    EXPECT_EQ(min_norm_point_exact(gamma_3(6)).distance2, make_rational(1, 38346));
    EXPECT_EQ(oracle_min_norm2(to_rational_rows(gamma_3(5))), make_rational(1, 5720));
    EXPECT_EQ(min_norm_point_exact(gamma_qubit(7)).distance2, make_rational(1, 66));
    EXPECT_EQ(min_norm_point_exact(gamma_qubit(8)).distance2, make_rational(1, 306));
    EXPECT_EQ(min_norm_point_exact(gamma_4(4)).distance2, make_rational(1, 510));
    EXPECT_EQ(min_norm_point_exact(gamma_4(5)).distance2, make_rational(1, 3860));
}

TEST(MinNorm, QuiverDistances) {
    // (n, d, dist^2, |x_d|^2), frozen
    struct Q {
        int n, d;
        Rational d2, x2;
    };
    std::vector<Q> frozen = {{2, 2, make_rational(1, 2), make_rational(1, 2)},
                             {2, 3, make_rational(1, 10), make_rational(1, 8)},
                             {2, 4, make_rational(1, 28), make_rational(1, 18)},
                             {3, 2, make_rational(1, 6), make_rational(1, 6)},
                             {3, 3, make_rational(1, 60), make_rational(1, 54)},
                             {3, 4, make_rational(1, 354), make_rational(1, 294)},
                             {4, 2, make_rational(1, 12), make_rational(1, 12)},
                             {4, 3, make_rational(1, 204), make_rational(1, 192)},
                             {4, 4, make_rational(1, 2232), make_rational(1, 2028)}};
    for (const auto& f : frozen) {
        auto q = quiver_instance(f.n, f.d);
        auto rows = to_rational_rows(q.gamma);
        EXPECT_EQ(min_norm_point_exact(rows).distance2, f.d2) << f.n << "," << f.d;
        if (rows.size() <= 14) EXPECT_EQ(oracle_min_norm2(rows), f.d2);
        EXPECT_EQ(rdot(q.x_d, q.x_d), f.x2);
        EXPECT_LE(f.d2, f.x2);
    }
}

TEST(MinNorm, WitnessBounds) {
    for (int d = 3; d <= 20; ++d)
        EXPECT_LE(min_norm_point(gamma_qubit(d), exact_opts()).exact->distance2, pow2(-d + 2)) << d;
    for (int n = 3; n <= 14; ++n) {
        auto e = min_norm_point(gamma_3(n), exact_opts());
        EXPECT_TRUE(e.converged) << n;
        EXPECT_GT(e.exact->distance2, 0);
        EXPECT_LE(e.exact->distance2, pow2(-2 * n + 2)) << n;
    }
    for (int n = 3; n <= 5; ++n)
        for (int r = 2; r <= 3; ++r) {
            Rational b2 = make_rational(6, (n - 1) * (n - 1) * r) * pow2(-2 * r * (n - 1) + 2);
            EXPECT_LE(min_norm_point(gamma_stacked(n, r), exact_opts()).exact->distance2, b2) << n << "," << r;
        }
}

TEST(MinNorm, CertificatesAndDistanceBounds) {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        int dim = 2 + trial % 4, k = 1 + trial % 9;
        Eigen::MatrixXd X(dim, k);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < k; ++j) X(i, j) = N(rng) + (trial % 2 ? 1.5 : 0.0);
        auto r = min_norm_point(X);
        for (int j = 0; j < k; ++j) EXPECT_LE(r.distance, X.col(j).norm() + 1e-12);
        EXPECT_NEAR(r.coefficients.sum(), 1.0, 1e-12);
        EXPECT_GE(r.coefficients.minCoeff(), -1e-15);
        EXPECT_NEAR((X * r.coefficients - r.point).norm(), 0.0, 1e-10);
        if (!r.zero_in_hull) {
            Eigen::VectorXd g = X.transpose() * r.separator;
            EXPECT_GE(g.minCoeff(), r.margin - 1e-15);
            EXPECT_LE(r.margin / r.separator.norm(), r.distance + 1e-12);
        }
        // 0 in conv iff the exact simplex says so, for well-separated cases
        RationalMatrix P;
        for (int j = 0; j < k; ++j) {
            RationalVector v;
            for (int i = 0; i < dim; ++i) v.push_back(from_double(X(i, j)));
            P.push_back(v);
        }
        auto cm = in_convex_hull_zero(P);
        if (r.distance > 1e-6 || cm.member) EXPECT_EQ(cm.member, r.zero_in_hull) << trial;
    }
}

TEST(MinNorm, ExactSeparationCertificate) {
    for (int n = 3; n <= 8; ++n) {
        auto ws = gamma_3(n);
        auto r = min_norm_point(ws, exact_opts());
        Rational sep = exact_separation(r.separator, ws);
        EXPECT_GT(sep, 0);
        for (const auto& row : to_rational_rows(ws)) EXPECT_GE(dot(r.exact->point, row), r.exact->distance2);
    }
}

// --------------------------------------------------------------- membership

TEST(AffineHull, Examples) {
    EXPECT_FALSE(in_affine_hull_zero(gamma_3(3)).member);
    EXPECT_FALSE(in_affine_hull_zero(gamma_stacked(3, 2)).member);
    WeightSet e(Dimensions(4, 1), "eps");
    for (int i = 1; i <= 4; ++i) e.add(epsilon(4, i));
    auto m = in_affine_hull_zero(e);
    ASSERT_TRUE(m.member);
    for (const auto& c : m.coefficients) EXPECT_EQ(c, make_rational(1, 4));
}

TEST(AffineHull, WitnessFamilies) {
    for (int d = 3; d <= 20; ++d) EXPECT_FALSE(in_affine_hull_zero(gamma_qubit(d)).member) << d;
    for (int n = 3; n <= 14; ++n) EXPECT_FALSE(in_affine_hull_zero(gamma_3(n)).member) << n;
}

TEST(ConvexHull, Examples) {
    auto I = diameter_instance(2);
    WeightSet rows(Dimensions(I.n, 3), "rows");
    for (const auto& t : I.rows) rows.add(weight_of_index(rows.dims(), t));
    auto m = in_convex_hull_zero(to_rational_rows(rows));
    EXPECT_TRUE(m.member);
    auto q3 = in_convex_hull_zero(to_rational_rows(quiver_instance(3, 3).gamma));
    EXPECT_FALSE(q3.member);
    for (const auto& row : to_rational_rows(quiver_instance(3, 3).gamma)) EXPECT_GE(dot(q3.separator, row), q3.separation);
    EXPECT_GT(q3.separation, 0);
    WeightSet pair(Dimensions(2, 1), "pair");
    pair.add(epsilon(2, 1));
    pair.add(epsilon(2, 2));
    auto pm = in_convex_hull_zero(to_rational_rows(pair));
    ASSERT_TRUE(pm.member);
    EXPECT_EQ(pm.coefficients, (RationalVector{make_rational(1, 2), make_rational(1, 2)}));
}

TEST(ConvexHull, MemberCoefficientsReproduceZero) {
    auto ws = omega_full(Dimensions(3, 2));
    auto P = to_rational_rows(ws);
    auto m = in_convex_hull_zero(P);
    ASSERT_TRUE(m.member);
    RationalVector s(P.front().size(), Rational(0));
    Rational total = 0;
    for (std::size_t k = 0; k < P.size(); ++k) {
        EXPECT_GE(m.coefficients[k], 0);
        total += m.coefficients[k];
        for (std::size_t c = 0; c < s.size(); ++c) s[c] += m.coefficients[k] * P[k][c];
    }
    EXPECT_EQ(total, 1);
    EXPECT_EQ(s, RationalVector(s.size(), Rational(0)));
}

// ----------------------------------------------------------- affine distance

TEST(AffineDistance, Examples) {
    Eigen::MatrixXd X = cols({{1, 0, 0}, {0, 1, 0}});
    auto in = dist_to_affine_hull(Eigen::Vector3d(0.25, 0.75, 0.0), X);
    EXPECT_NEAR(in.distance, 0.0, 1e-14);
    auto off = dist_to_affine_hull(Eigen::Vector3d(0.5, 0.5, 2.0), X);
    EXPECT_NEAR(off.distance, 2.0, 1e-14);
    EXPECT_NEAR((off.foot - Eigen::Vector3d(0.5, 0.5, 0.0)).norm(), 0.0, 1e-14);
}

TEST(AffineDistance, DiameterEta) {
    std::vector<double> eta;
    for (int l = 2; l <= 6; ++l) {
        auto I = diameter_instance(l);
        auto prog = GeometricProgram::from_array(I.p);
        Eigen::VectorXd target;
        std::vector<Eigen::VectorXd> rest;
        for (std::size_t k = 0; k < prog.size(); ++k) {
            if (prog.indices()[k] == I.omega_prime) target = prog.weights().row(k).transpose();
            else rest.push_back(prog.weights().row(k).transpose());
        }
        Eigen::MatrixXd X(target.size(), rest.size());
        for (std::size_t c = 0; c < rest.size(); ++c) X.col(c) = rest[c];
        double d = dist_to_affine_hull(target, X).distance;
        EXPECT_NEAR(d, I.eta(), 1e-10) << l;
        eta.push_back(d);
    }
    EXPECT_NEAR(eta[0], 0.28867513459481287, 1e-10);
    for (std::size_t k = 0; k + 1 < eta.size(); ++k) {
        EXPECT_GE(eta[k] / eta[k + 1], 1.7);
        EXPECT_LE(eta[k] / eta[k + 1], 2.3);
    }
}

// ------------------------------------------------------------------ margins

TEST(Margin, Examples) {
    auto m22 = margin_bruteforce(omega_full(Dimensions(2, 2)));
    EXPECT_EQ(m22.margin2, make_rational(1, 2));
    EXPECT_NEAR(m22.margin(), 1.0 / std::sqrt(2.0), 1e-10);
    EXPECT_EQ(margin_bruteforce(omega_full(Dimensions(2, 1))).margin2, make_rational(1, 2));
    auto m23 = margin_bruteforce(omega_full(Dimensions(2, 3)));
    EXPECT_EQ(m23.margin2, make_rational(1, 6));
    EXPECT_LE(m23.margin(), std::pow(2.0, -0.5));
    EXPECT_THROW(margin_bruteforce(omega_full(Dimensions(3, 3)), 20), std::length_error);
}

TEST(Margin, BelowEverySubsetDistance) {
    auto om = omega_full(Dimensions(2, 3));
    auto m = margin_bruteforce(om);
    auto P = to_rational_rows(om);
    for (std::uint64_t mask = 1; mask < (1u << P.size()); ++mask) {
        RationalMatrix sub;
        for (std::size_t k = 0; k < P.size(); ++k)
            if (mask >> k & 1) sub.push_back(P[k]);
        Rational d2 = oracle_min_norm2(sub);
        if (d2 > 0) EXPECT_LE(m.margin2, d2);
    }
    EXPECT_LE(m.margin2, min_norm_point_exact(gamma_qubit(3)).distance2);
}

// ---------------------------------------------------------- singular values

TEST(SingularValues, Examples) {
    auto id = smallest_nonzero_singular_value(Eigen::Matrix3d::Identity());
    EXPECT_NEAR(id.sigma_min_nonzero, 1.0, 1e-14);
    EXPECT_EQ(id.zero_count, 0u);
    Eigen::MatrixXd path = Eigen::MatrixXd::Zero(3, 4);
    for (int e = 0; e < 3; ++e) {
        path(e, e) = 1;
        path(e, e + 1) = -1;
    }
    auto ps = smallest_nonzero_singular_value(path);
    EXPECT_EQ(ps.zero_count, 1u);
    EXPECT_NEAR(ps.sigma_min_nonzero, std::sqrt(2.0 - 2.0 * std::cos(M_PI / 4.0)), 1e-12);
    EXPECT_GE(ps.sigma_min_nonzero, 1.0 / 16.0);
}

TEST(SingularValues, DiameterMatrix) {
    const std::vector<double> frozen = {0.618, 0.401, 0.305, 0.249};
    for (int l = 2; l <= 5; ++l) {
        auto I = diameter_instance(l);
        Eigen::MatrixXd M(I.M.size(), I.M.front().size());
        for (std::size_t i = 0; i < I.M.size(); ++i)
            for (std::size_t j = 0; j < I.M[i].size(); ++j) M(i, j) = I.M[i][j];
        auto s = smallest_nonzero_singular_value(M);
        EXPECT_EQ(s.zero_count, 3u) << l;
        EXPECT_GE(s.sigma_min_nonzero, 0.1 / I.n);
        EXPECT_NEAR(s.sigma_min_nonzero, frozen[l - 2], 5e-4);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        auto sv = svd.singularValues();
        int zeros = 0;
        double smin = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < sv.size(); ++k) {
            if (sv(k) <= 1e-6 * sv(0)) ++zeros;
            else smin = std::min(smin, sv(k));
        }
        // M is (3n-3) x 3n: three columns beyond the rows plus the rank deficiency
        EXPECT_NEAR(smin, s.sigma_min_nonzero, 1e-10);
        EXPECT_EQ(static_cast<std::size_t>(zeros) + (M.cols() - sv.size()), s.zero_count);
    }
}

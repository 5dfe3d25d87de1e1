#include <scalebar/scalebar.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace scalebar;

namespace {

// Pairwise oracle: distinct tuples must differ in at least two positions.
bool free_by_pairs(const std::vector<IndexTuple>& m) {
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b) {
            int diff = 0;
            for (std::size_t k = 0; k < m[a].size(); ++k) diff += m[a][k] != m[b][k];
            if (diff == 1) return false;
        }
    return true;
}

std::vector<Rational> coords(const WeightVector& w) { return w.coords(); }

}  // namespace

TEST(Epsilon, UnrolledDefinition) {
    EXPECT_EQ(coords(epsilon(2, 1)), (std::vector<Rational>{make_rational(1, 2), make_rational(-1, 2)}));
    EXPECT_EQ(coords(epsilon(3, 2)),
              (std::vector<Rational>{make_rational(-1, 3), make_rational(2, 3), make_rational(-1, 3)}));
    EXPECT_EQ(coords(epsilon(1, 1)), (std::vector<Rational>{Rational(0)}));
}

TEST(Epsilon, RejectsOutOfRange) {
    EXPECT_THROW(epsilon(3, 0), std::out_of_range);
    EXPECT_THROW(epsilon(3, 4), std::out_of_range);
}

TEST(Epsilon, UniqueAffineCombinationOfZero) {
    for (int n = 2; n <= 8; ++n) {
        RationalMatrix rows;
        for (int i = 1; i <= n; ++i) rows.push_back(epsilon(n, i).coords());
        std::vector<Rational> s(n, Rational(0));
        for (const auto& r : rows)
            for (int c = 0; c < n; ++c) s[c] += make_rational(1, n) * r[c];
        EXPECT_EQ(s, std::vector<Rational>(n, Rational(0)));
        auto m = in_affine_hull_zero(rows);
        ASSERT_TRUE(m.member);
        EXPECT_EQ(m.rank, static_cast<std::size_t>(n));  // [eps; 1] has full rank: the combination is unique
        for (const auto& c : m.coefficients) EXPECT_EQ(c, make_rational(1, n));
    }
}

TEST(OmegaFull, Cardinalities) {
    EXPECT_EQ(omega_full(Dimensions(2, 2)).size(), 4u);
    EXPECT_EQ(omega_full(Dimensions(3, 3)).size(), 27u);
    auto o21 = omega_full(Dimensions(2, 1));
    ASSERT_EQ(o21.size(), 2u);
    EXPECT_TRUE(o21.contains(epsilon(2, 1)));
    EXPECT_TRUE(o21.contains(epsilon(2, 2)));
}

TEST(OmegaFull, BlocksSumToZero) {
    for (int n = 1; n <= 4; ++n)
        for (int d = 1; d <= 3; ++d) {
            auto om = omega_full(Dimensions(n, d));
            for (const auto& w : om.elements())
                for (int b = 0; b < d; ++b) {
                    Rational s = 0;
                    for (int i = 0; i < n; ++i) s += w.coord(b * n + i);
                    EXPECT_EQ(s, 0);
                }
        }
}

TEST(WeightsOfIndices, Examples) {
    auto r = weights_of_indices(Dimensions(2, 3), {{1, 1, 1}});
    ASSERT_EQ(r.weights.size(), 1u);
    EXPECT_EQ(r.weights[0], epsilon(2, 1).append(epsilon(2, 1)).append(epsilon(2, 1)));

    EXPECT_EQ(weights_of_indices(Dimensions(3, 3), frak_W(3)).weights.size(), 6u);

    auto pair = weights_of_indices(Dimensions(2, 2), {{1, 2}, {2, 1}}).weights;
    ASSERT_EQ(pair.size(), 2u);
    auto sum = pair[0] + pair[1];
    for (auto v : sum.scaled()) EXPECT_EQ(v, 0);
}

TEST(WeightsOfIndices, DuplicatesReported) {
    auto r = weights_of_indices(Dimensions(2, 2), {{1, 2}, {2, 1}, {1, 2}});
    EXPECT_EQ(r.weights.size(), 2u);
    EXPECT_EQ(r.duplicates, std::vector<std::size_t>{2});
}

TEST(WeightSet, PreservesInsertionOrder) {
    WeightSet ws(Dimensions(3, 1), "order");
    ws.add(epsilon(3, 3));
    ws.add(epsilon(3, 1));
    ws.add(epsilon(3, 2));
    EXPECT_EQ(ws[0], epsilon(3, 3));
    EXPECT_EQ(ws[1], epsilon(3, 1));
    EXPECT_EQ(ws[2], epsilon(3, 2));
    EXPECT_FALSE(ws.add(epsilon(3, 1)));
}

TEST(WeightVector, RejectsNonZeroBlock) {
    EXPECT_THROW(WeightVector(Dimensions(2, 1), {1, 0}), std::invalid_argument);
    EXPECT_THROW(WeightVector(Dimensions(2, 1), {1, -1, 0}), std::invalid_argument);
}

TEST(IndexOfWeight, InvertsWeightOfIndex) {
    Dimensions dims(3, 3);
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            for (int c = 1; c <= 3; ++c) {
                IndexTuple t{a, b, c};
                auto back = index_of_weight(weight_of_index(dims, t));
                ASSERT_TRUE(back.has_value());
                EXPECT_EQ(*back, t);
            }
}

TEST(Freeness, Examples) {
    EXPECT_TRUE(is_free_indices(frak_W(4)).free);
    auto nf = is_free_indices({{1, 1, 1}, {1, 1, 2}});
    EXPECT_FALSE(nf.free);
    ASSERT_TRUE(nf.violating.has_value());
    EXPECT_EQ(*nf.violating, std::make_pair(std::size_t(0), std::size_t(1)));
    std::vector<IndexTuple> rows;
    auto A6 = qubit_matrix(3);
    for (int i = 1; i <= 6; ++i) rows.push_back(A6.row(i));
    EXPECT_TRUE(is_free_indices(rows).free);
}

TEST(Freeness, WeightExamples) {
    EXPECT_TRUE(is_free_weights(gamma_3(3)).free);
    EXPECT_FALSE(is_free_weights(quiver_instance(2, 2).gamma).free);
    WeightSet single(Dimensions(3, 2), "single");
    single.add(epsilon(3, 1).append(epsilon(3, 2)));
    EXPECT_TRUE(is_free_weights(single).free);
}

TEST(Freeness, IndexAndRootTestsAgreeOnRandomSets) {
    std::mt19937_64 rng(0);
    int nonfree = 0;
    for (int trial = 0; trial < 400; ++trial) {
        int n = 2 + static_cast<int>(rng() % 3), d = 1 + static_cast<int>(rng() % 4);
        Dimensions dims(n, d);
        std::uniform_int_distribution<int> U(1, n);
        std::vector<IndexTuple> m;
        int count = 1 + static_cast<int>(rng() % 6);
        for (int k = 0; k < count; ++k) {
            std::vector<int> t(d);
            for (auto& x : t) x = U(rng);
            IndexTuple it(t);
            if (std::find(m.begin(), m.end(), it) == m.end()) m.push_back(it);
        }
        bool by_index = is_free_indices(m).free;
        EXPECT_EQ(by_index, free_by_pairs(m));
        EXPECT_EQ(by_index, is_free_weights(weights_of_indices(dims, m).weights).free);
        nonfree += !by_index;
    }
    EXPECT_GT(nonfree, 50);  // both outcomes exercised
}

TEST(SparseArray, SlicesAndTotals) {
    SparseArray a(Dimensions(2, 2));
    a.set({1, 1}, make_rational(1, 3));
    a.set({1, 2}, make_rational(1, 6));
    a.add({1, 2}, make_rational(1, 6));
    a.set({2, 2}, make_rational(1, 3));
    EXPECT_EQ(a.total(), 1);
    EXPECT_EQ(a.slice_sum(0, 1), make_rational(2, 3));
    EXPECT_EQ(a.slice_sum(1, 2), make_rational(2, 3));
    EXPECT_EQ(a.get({2, 1}), 0);
    a.set({2, 2}, 0);
    EXPECT_EQ(a.size(), 2u);
    EXPECT_THROW(a.set({1, 1}, -1), std::invalid_argument);
    EXPECT_THROW(a.set({1, 3}, 1), std::out_of_range);
}

TEST(ComplexTensor, Norm) {
    ComplexTensor v(Dimensions(2, 2));
    v.set({1, 1}, {3.0, 4.0});
    v.set({2, 1}, {0.0, 1.0});
    EXPECT_DOUBLE_EQ(v.norm2(), 26.0);
    v.set({2, 1}, {0.0, 0.0});
    EXPECT_EQ(v.entries().size(), 1u);
}

TEST(Rational, ParseAndFormat) {
    EXPECT_EQ(parse_rational("-3/6"), make_rational(-1, 2));
    EXPECT_EQ(parse_rational("7"), 7);
    EXPECT_EQ(to_pq(make_rational(2, 4)), "1/2");
    EXPECT_EQ(to_pq(Rational(3)), "3/1");
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("x"), std::invalid_argument);
    EXPECT_EQ(pow2(-3), make_rational(1, 8));
    EXPECT_EQ(rational_pow(make_rational(2, 3), 3), make_rational(8, 27));
}

#pragma once

// Explicit witness instances: qubit matrices, Kravtsov arrays, stacked and
// padded weight sets, polynomial weights, quiver weights and the diameter
// instance built on the tree D_l.

#include "weights.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace scalebar {

// ---------------------------------------------------------------- qubit sets

struct QubitMatrix {
    int r = 1;
    std::vector<std::vector<int>> entries;  // 2r x 2r over {1,2}

    int at(int i, int j) const { return entries.at(i - 1).at(j - 1); }
    IndexTuple row(int i) const { return IndexTuple(entries.at(i - 1)); }
};

namespace detail {
// Entry (i, j) of A_{2r}, 1-based, independent of r.
inline int qubit_entry(int i, int j) {
    static constexpr int A2[2][2] = {{1, 1}, {2, 1}};
    static constexpr int B1[2][2] = {{1, 1}, {2, 2}};
    static constexpr int B2[2][2] = {{1, 2}, {2, 2}};
    static constexpr int B3[2][2] = {{2, 1}, {1, 1}};
    int bi = (i - 1) / 2, bj = (j - 1) / 2, ii = (i - 1) % 2, jj = (j - 1) % 2;
    if (bi == 0 && bj == 0) return A2[ii][jj];
    if (bi < bj) return B1[ii][jj];
    if (bi > bj) return B2[ii][jj];
    return B3[ii][jj];
}
}  // namespace detail

inline QubitMatrix qubit_matrix(int r) {
    if (r < 1) throw std::invalid_argument("qubit_matrix requires r >= 1");
    QubitMatrix a;
    a.r = r;
    a.entries.assign(2 * r, std::vector<int>(2 * r));
    for (int i = 1; i <= 2 * r; ++i)
        for (int j = 1; j <= 2 * r; ++j) a.entries[i - 1][j - 1] = detail::qubit_entry(i, j);
    return a;
}

// Index tuples behind Gamma_{2,d}: rows of A_{2r}, plus chi(i) when d is odd.
inline std::vector<IndexTuple> qubit_indices(int d) {
    if (d < 3) throw std::invalid_argument("gamma_qubit requires d >= 3");
    int r = d / 2;
    QubitMatrix a = qubit_matrix(r);
    std::vector<IndexTuple> out;
    for (int i = 1; i <= 2 * r; ++i) {
        IndexTuple t = a.row(i);
        if (d % 2 == 1) t.indices.push_back(i % 2 == 1 ? 1 : 2);
        out.push_back(std::move(t));
    }
    return out;
}

inline WeightSet gamma_qubit(int d) {
    return weights_of_indices(Dimensions(2, d), qubit_indices(d), "Gamma(n=2,d=" + std::to_string(d) + ")").weights;
}

// --------------------------------------------------------- Kravtsov / W_n

struct KravtsovArray {
    int n = 3;
    SparseArray lambda;
};

inline KravtsovArray kravtsov_lambda(int n) {
    if (n < 3) throw std::invalid_argument("kravtsov_lambda requires n >= 3");
    KravtsovArray k{n, SparseArray(Dimensions(n, 3))};
    auto& L = k.lambda;
    L.set({1, 1, 1}, pow2(-n + 1));
    L.set({1, 2, 2}, 1 - pow2(-n + 1));
    for (int s = 2; s <= n - 1; ++s) {
        L.set({s, 1, s}, pow2(-n + s - 1));
        L.set({s, s, 1}, pow2(-n + s - 1));
        L.set({s, s + 1, s + 1}, 1 - pow2(-n + s));
    }
    L.set({n, 1, n}, make_rational(1, 2));
    L.set({n, n, 1}, make_rational(1, 2));
    return k;
}

inline std::vector<IndexTuple> frak_W(int n) {
    if (n < 2) throw std::invalid_argument("frak_W requires n >= 2");
    std::vector<IndexTuple> out;
    for (int s = 2; s <= n; ++s) {
        out.push_back({s, 1, s});
        out.push_back({s, s, 1});
        out.push_back({s - 1, s, s});
    }
    return out;
}

inline WeightSet gamma_3(int n) {
    if (n < 3) throw std::invalid_argument("gamma_3 requires n >= 3");
    return weights_of_indices(Dimensions(n, 3), frak_W(n), "Gamma(n=" + std::to_string(n) + ",d=3)").weights;
}

// ------------------------------------------------------------ stacked sets

struct SigmaTable {
    int n = 3;
    int r = 2;
    std::vector<std::vector<int>> table;  // table[j-1][k-1] = sigma_k(j), j in [rn], k in [2r-1]

    IndexTuple operator()(int j) const { return IndexTuple(table.at(j - 1)); }
    int component(int k, int j) const { return table.at(j - 1).at(k - 1); }
};

inline SigmaTable sigma_table(int n, int r) {
    if (n < 3 || r < 2) throw std::invalid_argument("sigma_table requires n >= 3 and r >= 2");
    SigmaTable s{n, r, {}};
    const int N = r * n, K = 2 * r - 1;
    auto mod_adj = [n](int v) { return (v - 1) % n + 1; };
    auto sigma = [&](int i, int j) { return mod_adj((j + i - 1 + r - 1) / r); };
    s.table.assign(N, std::vector<int>(K));
    for (int j = 1; j <= N; ++j) {
        for (int i = 1; i <= r; ++i) s.table[j - 1][i - 1] = sigma(i, j);
        for (int i = 1; i <= r - 1; ++i) {
            // sigma_1 composed with the transposition of r-i+1 and r+1.
            int a = r - i + 1, b = r + 1;
            int jj = j == a ? b : (j == b ? a : j);
            s.table[j - 1][r + i - 1] = sigma(1, jj);
        }
    }
    return s;
}

inline std::vector<IndexTuple> stacked_indices(int n, int r) {
    SigmaTable s = sigma_table(n, r);
    std::vector<IndexTuple> out;
    for (const auto& t : frak_W(r * n)) {
        bool in_J = t[0] >= 2 && t[0] <= r && ((t[1] == 1 && t[2] == t[0]) || (t[1] == t[0] && t[2] == 1));
        if (in_J) continue;
        IndexTuple e;
        for (int slot = 0; slot < 3; ++slot) {
            auto part = s(t[slot]).indices;
            e.indices.insert(e.indices.end(), part.begin(), part.end());
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline WeightSet gamma_stacked(int n, int r) {
    return weights_of_indices(Dimensions(n, 6 * r - 3), stacked_indices(n, r),
                              "Gamma(n=" + std::to_string(n) + ",d=" + std::to_string(6 * r - 3) + ")")
        .weights;
}

// ------------------------------------------------------ 4-tensors, padding

inline std::vector<IndexTuple> gamma_4_indices(int n) {
    std::vector<IndexTuple> out;
    for (const auto& t : frak_W(n)) out.push_back({t[0], t[1], t[2], t[0]});
    return out;
}

inline WeightSet gamma_4(int n) {
    if (n < 3) throw std::invalid_argument("gamma_4 requires n >= 3");
    return weights_of_indices(Dimensions(n, 4), gamma_4_indices(n), "Gamma(n=" + std::to_string(n) + ",d=4)").weights;
}

// Gamma x Delta_r with Delta_r = {(eps_i, ..., eps_i)}: element-major order.
inline WeightSet pad_weightset(const WeightSet& g, int r) {
    if (g.empty()) throw std::invalid_argument("pad_weightset requires a nonempty set");
    if (r < 1) throw std::invalid_argument("pad_weightset requires r >= 1");
    const int n = g.dims().n;
    WeightSet out(Dimensions(n, g.dims().d + r), g.label() + "xDelta" + std::to_string(r));
    for (const auto& w : g.elements())
        for (int i = 1; i <= n; ++i) {
            WeightVector e = w;
            for (int k = 0; k < r; ++k) e = e.append(epsilon(n, i));
            out.add(e);
        }
    return out;
}

inline std::vector<IndexTuple> pad_indices(const std::vector<IndexTuple>& m, int n, int r) {
    std::vector<IndexTuple> out;
    for (const auto& t : m)
        for (int i = 1; i <= n; ++i) {
            IndexTuple e = t;
            e.indices.insert(e.indices.end(), r, i);
            out.push_back(std::move(e));
        }
    return out;
}

// ------------------------------------------------------ polynomial weights

struct PolyWeights {
    int n = 1;
    int degree = 1;
    int m = 1;  // n / degree
    WeightSet omega_prime;
};

// Elements -alpha + (d/n) 1_n over |alpha| = d, alpha in lexicographically
// decreasing order; single block of length n.
inline PolyWeights omega_poly(int n, int degree) {
    if (n < 1 || degree < 1) throw std::invalid_argument("omega_poly requires n, d >= 1");
    if (n % degree != 0) throw std::invalid_argument("omega_poly requires d | n");
    PolyWeights pw{n, degree, n / degree,
                   WeightSet(Dimensions(n, 1), "OmegaPoly(n=" + std::to_string(n) + ",d=" + std::to_string(degree) + ")")};
    std::vector<int> alpha(n, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1) {
            alpha[pos] = left;
            std::vector<std::int64_t> s(n);
            for (int i = 0; i < n; ++i) s[i] = -static_cast<std::int64_t>(alpha[i]) * n + degree;
            pw.omega_prime.add(WeightVector(Dimensions(n, 1), std::move(s)));
            return;
        }
        for (int a = left; a >= 0; --a) {
            alpha[pos] = a;
            rec(pos + 1, left - a);
        }
    };
    rec(0, degree);
    return pw;
}

// Image of -w for w in (R^m)^d inside R^{dm}: -(eps_{i_1}, ..., eps_{i_d}).
inline WeightSet poly_embed_negated(const WeightSet& g) {
    const int m = g.dims().n, d = g.dims().d, n = m * d;
    WeightSet out(Dimensions(n, 1), "-" + g.label() + " in R^" + std::to_string(n));
    for (const auto& w : g.elements()) {
        std::vector<std::int64_t> s(n);
        for (int k = 0; k < n; ++k) s[k] = -w.scaled()[k] * d;
        // Concatenated blocks sum to zero, so the result is a single-block weight.
        out.add(WeightVector(Dimensions(n, 1), std::move(s)));
    }
    return out;
}

// ------------------------------------------------------------------ quiver

struct QuiverArrow {
    int tail = 1;  // 1-based vertex
    int head = 1;
    int level = 1;  // arrow between vertices level and level+1
    std::vector<std::pair<int, int>> ones;  // 1-based (row, col) positions of the 0/1 matrix
};

struct QuiverInstance {
    int n = 2;
    int d = 2;
    WeightSet gamma;
    Rational lambda_d;
    std::vector<Rational> x_d;          // length n*d
    std::vector<Rational> combination;  // convex weights over gamma reproducing x_d
    std::vector<QuiverArrow> arrows;    // n arrows per level, n(d-1) in total

    // Vertex receiving the arrow between level and level+1.
    static int head_of_level(int d, int level) { return (d - level) % 2 == 1 ? level : level + 1; }
};

namespace detail {
inline WeightVector quiver_weight(int n, int d, int head, int head_idx, int tail, int tail_idx) {
    std::vector<std::int64_t> s(n * d, 0);
    WeightVector eh = epsilon(n, head_idx), et = epsilon(n, tail_idx);
    for (int i = 0; i < n; ++i) {
        s[(head - 1) * n + i] += eh.scaled()[i];
        s[(tail - 1) * n + i] -= et.scaled()[i];
    }
    return WeightVector(Dimensions(n, d), std::move(s));
}
}  // namespace detail

inline QuiverInstance quiver_instance(int n, int d) {
    if (n < 2 || d < 2) throw std::invalid_argument("quiver_instance requires n >= 2 and d >= 2");
    QuiverInstance q;
    q.n = n;
    q.d = d;
    q.gamma = WeightSet(Dimensions(n, d), "QuiverGamma(n=" + std::to_string(n) + ",d=" + std::to_string(d) + ")");

    auto lambda = [n](int e) {
        Rational s = 0;
        for (int i = 1; i <= e - 1; ++i) s += rational_pow(Rational(n - 1), i);
        return 1 / s;
    };

    // Levels 1..d-2 carry (+-eps_i, -+eps_n), level d-1 carries (eps_i, -eps_j).
    std::vector<int> level_of;
    for (int l = 1; l <= d - 2; ++l) {
        int h = QuiverInstance::head_of_level(d, l), t = h == l ? l + 1 : l;
        for (int i = 1; i <= n - 1; ++i) {
            // eps_i sits at vertex l, eps_n at vertex l+1.
            q.gamma.add(h == l ? detail::quiver_weight(n, d, h, i, t, n) : detail::quiver_weight(n, d, h, n, t, i));
            level_of.push_back(l);
        }
    }
    for (int i = 1; i <= n - 1; ++i)
        for (int j = 1; j <= n; ++j) {
            q.gamma.add(detail::quiver_weight(n, d, d - 1, i, d, j));
            level_of.push_back(d - 1);
        }

    // Coefficients: level d-1 gets 1/((n-1)n) * prod of mu factors; in general
    // level l gets lambda_{d-l+1} times the product of mu's for levels < l.
    q.lambda_d = lambda(d);
    q.combination.assign(q.gamma.size(), Rational(0));
    Rational scale = 1;
    for (int l = 1; l <= d - 1; ++l) {
        int e = d - l + 1;  // Gamma_e occupies levels l..d-1
        Rational c = e == 2 ? Rational(1) / ((n - 1) * n) : lambda(e);
        for (std::size_t k = 0; k < q.gamma.size(); ++k)
            if (level_of[k] == l) q.combination[k] = scale * c;
        if (e > 2) scale *= (n - 1) * lambda(e) / lambda(e - 1);
    }

    q.x_d.assign(n * d, Rational(0));
    auto eps_n = epsilon(n, n);
    for (int i = 0; i < n; ++i) q.x_d[i] = (d % 2 == 1 ? 1 : -1) * q.lambda_d * eps_n.coord(i);

    // Matrix assignment.  Arrow matrices map the tail space to the head space;
    // entry (a, b) carries +eps_a at the head and -eps_b at the tail.
    for (int l = 1; l <= d - 1; ++l) {
        int h = QuiverInstance::head_of_level(d, l), t = h == l ? l + 1 : l;
        for (int k = 1; k <= n; ++k) {
            QuiverArrow a{t, h, l, {}};
            if (l == d - 1) {
                for (int i = 1; i <= n - 1; ++i) a.ones.push_back({i, (i - 1 + k - 1) % n + 1});  // M P^{k-1}
            } else {
                int i = k <= n - 1 ? k : 1;  // E_{1,n} is used twice
                a.ones.push_back(h == l ? std::make_pair(i, n) : std::make_pair(n, i));
            }
            q.arrows.push_back(std::move(a));
        }
    }
    return q;
}

// The pair of Gamma_d elements that differ by a root.
inline std::pair<WeightVector, WeightVector> quiver_nonfree_pair(int n, int d) {
    return {detail::quiver_weight(n, d, d - 1, 1, d, 1), detail::quiver_weight(n, d, d - 1, 1, d, 2)};
}

// ---------------------------------------------------------------- diameter

struct DiameterGraph {
    int l = 2;
    std::vector<std::string> names;   // r, u1..ul, v1..vl, w1..wl, wb{l-1}, wb{l}
    std::vector<int> level;           // depth below the root
    std::vector<std::pair<int, int>> edges;  // (tail = child, head = parent), 0-based vertices
    int vertex(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return static_cast<int>(k);
        throw std::out_of_range("no vertex named " + name);
    }
};

struct DiameterInstance {
    int l = 2;
    int n = 9;
    DiameterGraph graph;
    std::vector<std::vector<int>> M;  // (3n-3) x 3n, column 3v + i for vertex v, coordinate i
    std::vector<IndexTuple> rows;     // row k of M as an index tuple in [n]^3
    std::vector<Rational> q;          // weight of row k
    std::vector<Rational> kernel_f;   // length 3n, interleaved like the columns of M
    IndexTuple omega_prime;
    SparseArray p;

    // f laid out as three consecutive vertex blocks, matching weight coordinates.
    std::vector<Rational> kernel_blocks() const {
        std::vector<Rational> out(3 * n);
        for (int v = 0; v < n; ++v)
            for (int i = 0; i < 3; ++i) out[i * n + v] = kernel_f[3 * v + i];
        return out;
    }
    // f . omega' in exact arithmetic (epsilon or e basis agree since f sums to zero per block).
    Rational f_dot_omega_prime() const {
        Rational s = 0;
        for (int i = 0; i < 3; ++i) s += kernel_f[3 * (omega_prime[i] - 1) + i];
        return s;
    }
    Rational kernel_norm2() const {
        Rational s = 0;
        for (const auto& x : kernel_f) s += x * x;
        return s;
    }
    // Direction v = sign(f . omega') f, so that f_p(-t v/|v|) = (1 + e^{-eta t})/2.
    std::vector<double> descent_direction() const {
        auto b = kernel_blocks();
        double sign = f_dot_omega_prime() > 0 ? 1.0 : -1.0;
        std::vector<double> out(b.size());
        for (std::size_t k = 0; k < b.size(); ++k) out[k] = sign * to_double(b[k]);
        return out;
    }
    // |f . omega'| / |f|.
    double eta() const {
        return std::abs(to_double(f_dot_omega_prime())) / std::sqrt(to_double(kernel_norm2()));
    }
};

inline DiameterGraph diameter_graph(int l) {
    if (l < 2) throw std::invalid_argument("diameter instance requires l >= 2");
    DiameterGraph g;
    g.l = l;
    auto add = [&](std::string name, int lev) {
        g.names.push_back(std::move(name));
        g.level.push_back(lev);
    };
    add("r", 0);
    for (char c : std::string("uvw"))
        for (int j = 1; j <= l; ++j) add(std::string(1, c) + std::to_string(j), j);
    add("wb" + std::to_string(l - 1), l - 1);
    add("wb" + std::to_string(l), l);
    auto chain_parent = [&](char c, int j) { return j == 1 ? std::string("r") : std::string(1, c) + std::to_string(j - 1); };
    for (char c : std::string("uvw"))
        for (int j = 1; j <= l; ++j)
            g.edges.push_back({g.vertex(std::string(1, c) + std::to_string(j)), g.vertex(chain_parent(c, j))});
    std::string attach = l == 2 ? "r" : "w" + std::to_string(l - 2);
    g.edges.push_back({g.vertex("wb" + std::to_string(l - 1)), g.vertex(attach)});
    g.edges.push_back({g.vertex("wb" + std::to_string(l)), g.vertex("wb" + std::to_string(l - 1))});
    return g;
}

inline DiameterInstance diameter_instance(int l) {
    DiameterInstance I;
    I.l = l;
    I.graph = diameter_graph(l);
    const int n = static_cast<int>(I.graph.names.size());
    I.n = n;
    const Rational unit = Rational(1) / (6 * n);
    auto mpow = [](int e) { return e >= 0 ? rational_pow(Rational(-2), e) : 1 / rational_pow(Rational(-2), -e); };

    for (const auto& [tail, head] : I.graph.edges) {
        const std::string& name = I.graph.names[tail];
        int j = I.graph.level[tail];
        Rational qe;
        if (name[0] == 'u' || name[0] == 'v') qe = unit * (2 + mpow(-(l - j)));
        else if (name.rfind("wb", 0) == 0) qe = unit * (j == l ? Rational(3) : make_rational(3, 2));
        else if (j <= l - 2) qe = unit * (2 + mpow(-(l - j - 1)));
        else qe = unit * (j == l ? Rational(3) : make_rational(3, 2));
        for (int i = 0; i < 3; ++i) {
            std::vector<int> row(3 * n, 0);
            IndexTuple t{tail + 1, tail + 1, tail + 1};
            t[i] = head + 1;
            for (int k = 0; k < 3; ++k) row[3 * (t[k] - 1) + k] = 1;
            I.M.push_back(std::move(row));
            I.rows.push_back(t);
            I.q.push_back(qe);
        }
    }

    I.kernel_f.resize(3 * n);
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < 3; ++i) I.kernel_f[3 * v + i] = mpow(-I.graph.level[v]);

    I.omega_prime = IndexTuple{I.graph.vertex("u" + std::to_string(l)) + 1, I.graph.vertex("v" + std::to_string(l)) + 1,
                               I.graph.vertex("w" + std::to_string(l)) + 1};
    I.p = SparseArray(Dimensions(n, 3));
    for (std::size_t k = 0; k < I.rows.size(); ++k) I.p.add(I.rows[k], I.q[k] / 2);
    I.p.add(I.omega_prime, make_rational(1, 2));
    return I;
}

// q = (t/n) p on [t]^d plus 1/n on the diagonal tail t+1..n.
inline SparseArray pad_diameter_array(const SparseArray& p, int n) {
    const int t = p.dims().n, d = p.dims().d;
    if (t > n) throw std::invalid_argument("pad_diameter_array requires t <= n");
    if (p.total() != 1) throw std::invalid_argument("pad_diameter_array requires a unit-sum array");
    SparseArray q(Dimensions(n, d));
    for (const auto& [idx, v] : p.entries()) q.set(idx, v * t / n);
    for (int i = t + 1; i <= n; ++i) q.set(IndexTuple(std::vector<int>(d, i)), Rational(1, n));
    return q;
}

// ---------------------------------------------------------- rounded tensor

struct RoundedTensor {
    int bits = 0;
    std::map<IndexTuple, Rational> values;  // exact dyadic entries m / 2^bits
    SparseArray squares;                    // exact |v|^2
    Rational l1_error;                      // sum of p - |v|^2
    ComplexTensor tensor;                   // floating view
};

// v = floor(sqrt(p) 2^B) / 2^B, so |v|^2 <= p and p - |v|^2 < 2 sqrt(p) 2^{-B}.
inline RoundedTensor rounded_tensor(const SparseArray& p, int bits) {
    if (bits < 1) throw std::invalid_argument("rounded_tensor requires a positive bit budget");
    RoundedTensor rt;
    rt.bits = bits;
    rt.squares = SparseArray(p.dims());
    rt.tensor = ComplexTensor(p.dims());
    const BigInt scale = BigInt(1) << (2 * bits);
    const Rational den = pow2(bits);
    for (const auto& [idx, val] : p.entries()) {
        BigInt floor_scaled = numerator_of(val) * scale / denominator_of(val);
        BigInt m = boost::multiprecision::sqrt(floor_scaled);
        if (m == 0) throw std::domain_error("bit budget too small: entry " + to_string(idx) + " rounds to zero");
        Rational v = Rational(m) / den;
        rt.values[idx] = v;
        rt.squares.set(idx, v * v);
        rt.l1_error += val - v * v;
        rt.tensor.set(idx, {to_double(v), 0.0});
    }
    return rt;
}

}  // namespace scalebar

#pragma once

// Weights of SL(n)^d representations, index tuples, sparse arrays and roots.
//
// A weight is a vector in (R^n)^d whose d length-n blocks each sum to zero.
// Coordinates are held as integers scaled by n, which is exact for every
// weight family used here (epsilon weights, roots, polynomial weights).

#include "rational.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace scalebar {

struct Dimensions {
    int n = 1;
    int d = 1;

    Dimensions() = default;
    Dimensions(int n_, int d_) : n(n_), d(d_) {
        if (n < 1 || d < 1) throw std::invalid_argument("dimensions require n >= 1 and d >= 1");
    }
    int length() const { return n * d; }
    friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

class WeightVector {
public:
    WeightVector() = default;

    // scaled[k] is n times the k-th coordinate.
    WeightVector(Dimensions dims, std::vector<std::int64_t> scaled) : dims_(dims), scaled_(std::move(scaled)) {
        if (static_cast<int>(scaled_.size()) != dims_.length())
            throw std::invalid_argument("weight length does not match n*d");
        for (int b = 0; b < dims_.d; ++b) {
            std::int64_t s = 0;
            for (int i = 0; i < dims_.n; ++i) s += scaled_[b * dims_.n + i];
            if (s != 0) throw std::invalid_argument("weight block does not sum to zero");
        }
    }

    const Dimensions& dims() const { return dims_; }
    const std::vector<std::int64_t>& scaled() const { return scaled_; }
    std::size_t size() const { return scaled_.size(); }

    Rational coord(std::size_t k) const { return make_rational(scaled_.at(k), dims_.n); }
    std::vector<Rational> coords() const {
        std::vector<Rational> out;
        out.reserve(scaled_.size());
        for (std::size_t k = 0; k < scaled_.size(); ++k) out.push_back(coord(k));
        return out;
    }
    std::vector<double> to_doubles() const {
        std::vector<double> out(scaled_.size());
        for (std::size_t k = 0; k < scaled_.size(); ++k)
            out[k] = static_cast<double>(scaled_[k]) / dims_.n;
        return out;
    }

    // Exact squared Euclidean norm.
    Rational norm2() const {
        std::int64_t s = 0;
        for (auto v : scaled_) s += v * v;
        return make_rational(s, static_cast<long long>(dims_.n) * dims_.n);
    }

    WeightVector operator+(const WeightVector& o) const { return combine(o, 1); }
    WeightVector operator-(const WeightVector& o) const { return combine(o, -1); }
    WeightVector operator-() const {
        std::vector<std::int64_t> s(scaled_);
        for (auto& v : s) v = -v;
        return WeightVector(dims_, std::move(s));
    }

    // Concatenation of blocks (same n).
    WeightVector append(const WeightVector& o) const {
        if (o.dims_.n != dims_.n) throw std::invalid_argument("cannot append weights with different n");
        std::vector<std::int64_t> s(scaled_);
        s.insert(s.end(), o.scaled_.begin(), o.scaled_.end());
        return WeightVector(Dimensions(dims_.n, dims_.d + o.dims_.d), std::move(s));
    }

    friend bool operator==(const WeightVector& a, const WeightVector& b) {
        return a.dims_ == b.dims_ && a.scaled_ == b.scaled_;
    }
    friend bool operator<(const WeightVector& a, const WeightVector& b) { return a.scaled_ < b.scaled_; }

private:
    WeightVector combine(const WeightVector& o, int sign) const {
        if (!(o.dims_ == dims_)) throw std::invalid_argument("weight dimension mismatch");
        std::vector<std::int64_t> s(scaled_);
        for (std::size_t k = 0; k < s.size(); ++k) s[k] += sign * o.scaled_[k];
        return WeightVector(dims_, std::move(s));
    }

    Dimensions dims_;
    std::vector<std::int64_t> scaled_;
};

struct WeightVectorHash {
    std::size_t operator()(const WeightVector& w) const {
        std::size_t h = 1469598103934665603ull;
        for (auto v : w.scaled()) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

// 1-based index tuple in [n]^d.
struct IndexTuple {
    std::vector<int> indices;

    IndexTuple() = default;
    IndexTuple(std::initializer_list<int> il) : indices(il) {}
    explicit IndexTuple(std::vector<int> v) : indices(std::move(v)) {}

    std::size_t size() const { return indices.size(); }
    int operator[](std::size_t k) const { return indices[k]; }
    int& operator[](std::size_t k) { return indices[k]; }

    void validate(const Dimensions& dims) const {
        if (static_cast<int>(indices.size()) != dims.d)
            throw std::out_of_range("index tuple length differs from d");
        for (int i : indices)
            if (i < 1 || i > dims.n) throw std::out_of_range("index outside [n]");
    }

    friend auto operator<=>(const IndexTuple&, const IndexTuple&) = default;
    friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
};

inline std::string to_string(const IndexTuple& t) {
    std::string s = "(";
    for (std::size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + std::to_string(t[k]);
    return s + ")";
}

class WeightSet {
public:
    WeightSet() = default;
    WeightSet(Dimensions dims, std::string label) : dims_(dims), label_(std::move(label)) {}

    // Appends w unless already present; returns whether it was inserted.
    bool add(const WeightVector& w) {
        if (!(w.dims() == dims_)) throw std::invalid_argument("weight dimension mismatch in set");
        if (!index_.insert(w).second) return false;
        elements_.push_back(w);
        return true;
    }

    const Dimensions& dims() const { return dims_; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }
    const std::vector<WeightVector>& elements() const { return elements_; }
    const WeightVector& operator[](std::size_t k) const { return elements_[k]; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    bool contains(const WeightVector& w) const { return index_.count(w) > 0; }

    std::vector<std::vector<double>> to_doubles() const {
        std::vector<std::vector<double>> out;
        out.reserve(elements_.size());
        for (const auto& w : elements_) out.push_back(w.to_doubles());
        return out;
    }

    WeightSet negated() const {
        WeightSet out(dims_, "-" + label_);
        for (const auto& w : elements_) out.add(-w);
        return out;
    }

private:
    Dimensions dims_;
    std::string label_;
    std::vector<WeightVector> elements_;
    std::unordered_set<WeightVector, WeightVectorHash> index_;
};

// Nonnegative array with exact values; zero entries are never stored.
class SparseArray {
public:
    SparseArray() = default;
    explicit SparseArray(Dimensions dims) : dims_(dims) {}

    void set(const IndexTuple& idx, const Rational& value) {
        idx.validate(dims_);
        if (value < 0) throw std::invalid_argument("array entries must be nonnegative");
        if (value == 0) entries_.erase(idx);
        else entries_[idx] = value;
    }
    void add(const IndexTuple& idx, const Rational& value) {
        auto it = entries_.find(idx);
        set(idx, (it == entries_.end() ? Rational(0) : it->second) + value);
    }
    Rational get(const IndexTuple& idx) const {
        auto it = entries_.find(idx);
        return it == entries_.end() ? Rational(0) : it->second;
    }

    const Dimensions& dims() const { return dims_; }
    const std::map<IndexTuple, Rational>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    Rational total() const {
        Rational s = 0;
        for (const auto& [k, v] : entries_) s += v;
        return s;
    }

    // Sum over the slice {index_axis = value}, axis 0-based, value 1-based.
    Rational slice_sum(int axis, int value) const {
        Rational s = 0;
        for (const auto& [k, v] : entries_)
            if (k[axis] == value) s += v;
        return s;
    }

    std::vector<IndexTuple> support() const {
        std::vector<IndexTuple> out;
        out.reserve(entries_.size());
        for (const auto& [k, v] : entries_) out.push_back(k);
        return out;
    }

    friend bool operator==(const SparseArray& a, const SparseArray& b) {
        return a.dims_ == b.dims_ && a.entries_ == b.entries_;
    }

private:
    Dimensions dims_;
    std::map<IndexTuple, Rational> entries_;
};

// Sparse element of (C^n)^{(x)d}; zero entries are never stored.
class ComplexTensor {
public:
    using Value = std::complex<double>;

    ComplexTensor() = default;
    explicit ComplexTensor(Dimensions dims) : dims_(dims) {}

    void set(const IndexTuple& idx, Value v) {
        idx.validate(dims_);
        auto it = entries_.find(idx);
        if (it != entries_.end()) {
            norm2_ -= std::norm(it->second);
            entries_.erase(it);
        }
        if (v != Value(0.0, 0.0)) {
            entries_[idx] = v;
            norm2_ += std::norm(v);
        }
    }
    Value get(const IndexTuple& idx) const {
        auto it = entries_.find(idx);
        return it == entries_.end() ? Value(0.0, 0.0) : it->second;
    }

    const Dimensions& dims() const { return dims_; }
    const std::map<IndexTuple, Value>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // Cached sum of squared magnitudes; refresh() recomputes it from scratch.
    double norm2() const { return norm2_; }
    void refresh() {
        norm2_ = 0.0;
        for (const auto& [k, v] : entries_) norm2_ += std::norm(v);
    }

    std::vector<IndexTuple> support() const {
        std::vector<IndexTuple> out;
        for (const auto& [k, v] : entries_) out.push_back(k);
        return out;
    }

private:
    Dimensions dims_;
    std::map<IndexTuple, Value> entries_;
    double norm2_ = 0.0;
};

// epsilon_i = e_i - (1/n) 1_n as a single-block weight.
inline WeightVector epsilon(int n, int i) {
    if (n < 1) throw std::invalid_argument("epsilon requires n >= 1");
    if (i < 1 || i > n) throw std::out_of_range("epsilon index outside [n]");
    std::vector<std::int64_t> s(n, -1);
    s[i - 1] += n;
    return WeightVector(Dimensions(n, 1), std::move(s));
}

// (epsilon_{i_1}, ..., epsilon_{i_d}).
inline WeightVector weight_of_index(const Dimensions& dims, const IndexTuple& t) {
    t.validate(dims);
    std::vector<std::int64_t> s(dims.length(), -1);
    for (int b = 0; b < dims.d; ++b) s[b * dims.n + t[b] - 1] += dims.n;
    return WeightVector(dims, std::move(s));
}

// Inverse of weight_of_index when w is of epsilon type.
inline std::optional<IndexTuple> index_of_weight(const WeightVector& w) {
    const auto& dims = w.dims();
    IndexTuple t;
    t.indices.resize(dims.d);
    for (int b = 0; b < dims.d; ++b) {
        int hit = 0;
        for (int i = 0; i < dims.n; ++i) {
            auto v = w.scaled()[b * dims.n + i];
            if (v == dims.n - 1) { if (hit) return std::nullopt; hit = i + 1; }
            else if (v != -1) return std::nullopt;
        }
        if (!hit) return std::nullopt;
        t[b] = hit;
    }
    return t;
}

inline constexpr std::size_t omega_full_cap = std::size_t(1) << 22;

inline WeightSet omega_full(const Dimensions& dims) {
    double count = std::pow(static_cast<double>(dims.n), dims.d);
    if (count > static_cast<double>(omega_full_cap))
        throw std::length_error("omega_full would exceed the element cap");
    WeightSet ws(dims, "Omega(n=" + std::to_string(dims.n) + ",d=" + std::to_string(dims.d) + ")");
    IndexTuple t(std::vector<int>(dims.d, 1));
    while (true) {
        ws.add(weight_of_index(dims, t));
        int k = dims.d - 1;
        while (k >= 0 && t[k] == dims.n) t[k--] = 1;
        if (k < 0) break;
        ++t[k];
    }
    return ws;
}

struct WeightsOfIndicesResult {
    WeightSet weights;
    std::vector<std::size_t> duplicates;  // positions dropped as repeats
};

inline WeightsOfIndicesResult weights_of_indices(const Dimensions& dims, const std::vector<IndexTuple>& indices,
                                                 std::string label = "indices") {
    WeightsOfIndicesResult r{WeightSet(dims, std::move(label)), {}};
    for (std::size_t k = 0; k < indices.size(); ++k)
        if (!r.weights.add(weight_of_index(dims, indices[k]))) r.duplicates.push_back(k);
    return r;
}

struct FreenessResult {
    bool free = true;
    std::optional<std::pair<std::size_t, std::size_t>> violating;  // positions in the input
};

// Distinct tuples must differ in at least two positions.  Two tuples differ
// in at most one position iff they agree after deleting some position, so
// bucketing by each deletion finds violations in O(|M| d log |M|).
inline FreenessResult is_free_indices(const std::vector<IndexTuple>& indices) {
    FreenessResult res;
    if (indices.empty()) return res;
    const std::size_t d = indices.front().size();
    for (const auto& t : indices)
        if (t.size() != d) throw std::invalid_argument("index tuples of different lengths");
    for (std::size_t drop = 0; drop < d; ++drop) {
        std::map<std::vector<int>, std::size_t> seen;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            std::vector<int> key;
            key.reserve(d - 1);
            for (std::size_t j = 0; j < d; ++j)
                if (j != drop) key.push_back(indices[k][j]);
            auto [it, fresh] = seen.emplace(std::move(key), k);
            if (!fresh && indices[it->second] != indices[k]) {
                if (!res.violating || std::make_pair(it->second, k) < *res.violating)
                    res.violating = std::make_pair(it->second, k);
                res.free = false;
            }
        }
    }
    return res;
}

class RootSet {
public:
    explicit RootSet(Dimensions dims) : dims_(dims) {
        for (int b = 0; b < dims.d; ++b)
            for (int i = 0; i < dims.n; ++i)
                for (int j = 0; j < dims.n; ++j) {
                    if (i == j) continue;
                    std::vector<std::int64_t> s(dims.length(), 0);
                    s[b * dims.n + i] = dims.n;
                    s[b * dims.n + j] = -dims.n;
                    roots_.emplace_back(dims, std::move(s));
                }
    }
    const Dimensions& dims() const { return dims_; }
    const std::vector<WeightVector>& roots() const { return roots_; }
    std::size_t size() const { return roots_.size(); }

private:
    Dimensions dims_;
    std::vector<WeightVector> roots_;
};

struct WeightFreenessResult {
    bool free = true;
    std::optional<std::pair<std::size_t, std::size_t>> violating;  // (a, b) with w_b = w_a + root
    std::optional<std::size_t> root;
};

inline WeightFreenessResult is_free_weights(const WeightSet& ws, const RootSet& roots) {
    if (!(ws.dims() == roots.dims())) throw std::invalid_argument("weight set and roots differ in dims");
    std::unordered_map<WeightVector, std::size_t, WeightVectorHash> pos;
    for (std::size_t k = 0; k < ws.size(); ++k) pos.emplace(ws[k], k);
    WeightFreenessResult res;
    for (std::size_t a = 0; a < ws.size(); ++a)
        for (std::size_t r = 0; r < roots.size(); ++r) {
            auto it = pos.find(ws[a] + roots.roots()[r]);
            if (it != pos.end()) {
                res.free = false;
                res.violating = std::make_pair(a, it->second);
                res.root = r;
                return res;
            }
        }
    return res;
}

inline WeightFreenessResult is_free_weights(const WeightSet& ws) { return is_free_weights(ws, RootSet(ws.dims())); }

}  // namespace scalebar

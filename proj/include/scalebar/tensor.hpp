#pragma once

// The SL(n)^d action on tensors: torus and group action, quantum marginals,
// moment maps, freeness checks, gap-witness minimization, and the quiver
// representation built from the quiver witness.

#include "capacity.hpp"
#include "constructions.hpp"
#include "weights.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

namespace scalebar {

using cd = std::complex<double>;

// ---------------------------------------------------------------- elements

class TorusElement {
public:
    TorusElement() = default;

    // Log coordinates are projected to zero sum per block, so det = 1 exactly in log space.
    TorusElement(Dimensions dims, std::vector<Eigen::VectorXd> logs) : dims_(dims), logs_(std::move(logs)) {
        if (static_cast<int>(logs_.size()) != dims_.d) throw std::invalid_argument("torus element needs d blocks");
        for (auto& l : logs_) {
            if (l.size() != dims_.n) throw std::invalid_argument("torus block length differs from n");
            l.array() -= l.mean();
        }
    }

    static TorusElement identity(Dimensions dims) {
        return TorusElement(dims, std::vector<Eigen::VectorXd>(dims.d, Eigen::VectorXd::Zero(dims.n)));
    }

    // Splits a flat (n d)-vector into blocks.
    static TorusElement from_flat(Dimensions dims, const Eigen::VectorXd& x) {
        std::vector<Eigen::VectorXd> logs;
        for (int b = 0; b < dims.d; ++b) logs.push_back(x.segment(b * dims.n, dims.n));
        return TorusElement(dims, std::move(logs));
    }

    template <class Rng>
    static TorusElement random(Dimensions dims, Rng& rng, double scale = 1.0) {
        std::normal_distribution<double> N(0.0, scale);
        std::vector<Eigen::VectorXd> logs(dims.d, Eigen::VectorXd(dims.n));
        for (auto& l : logs)
            for (int i = 0; i < dims.n; ++i) l(i) = N(rng);
        return TorusElement(dims, std::move(logs));
    }

    const Dimensions& dims() const { return dims_; }
    const std::vector<Eigen::VectorXd>& logs() const { return logs_; }
    Eigen::VectorXd flat() const {
        Eigen::VectorXd x(dims_.length());
        for (int b = 0; b < dims_.d; ++b) x.segment(b * dims_.n, dims_.n) = logs_[b];
        return x;
    }
    double diagonal(int block, int i) const { return std::exp(logs_[block](i - 1)); }

private:
    Dimensions dims_;
    std::vector<Eigen::VectorXd> logs_;
};

class GroupElement {
public:
    GroupElement() = default;
    GroupElement(Dimensions dims, std::vector<Eigen::MatrixXcd> mats, double det_tol = 1e-10)
        : dims_(dims), mats_(std::move(mats)) {
        if (static_cast<int>(mats_.size()) != dims_.d) throw std::invalid_argument("group element needs d matrices");
        for (const auto& m : mats_) {
            if (m.rows() != dims_.n || m.cols() != dims_.n) throw std::invalid_argument("group factor is not n x n");
            if (std::abs(m.determinant() - cd(1.0, 0.0)) > det_tol)
                throw std::invalid_argument("group factor does not have determinant 1");
        }
    }
    static GroupElement identity(Dimensions dims) {
        return GroupElement(dims, std::vector<Eigen::MatrixXcd>(dims.d, Eigen::MatrixXcd::Identity(dims.n, dims.n)));
    }
    static GroupElement from_torus(const TorusElement& t) {
        std::vector<Eigen::MatrixXcd> m;
        for (const auto& l : t.logs()) m.push_back(l.array().exp().cast<cd>().matrix().asDiagonal());
        return GroupElement(t.dims(), std::move(m));
    }
    const Dimensions& dims() const { return dims_; }
    const std::vector<Eigen::MatrixXcd>& matrices() const { return mats_; }

private:
    Dimensions dims_;
    std::vector<Eigen::MatrixXcd> mats_;
};

struct MomentMapValue {
    std::vector<Eigen::MatrixXcd> components;
    double frobenius_norm = 0.0;
};

// ------------------------------------------------------------ dense helpers

namespace detail {

inline constexpr std::size_t dense_cap = std::size_t(1) << 24;

inline std::size_t dense_size(const Dimensions& dims) {
    double s = std::pow(static_cast<double>(dims.n), dims.d);
    if (s > static_cast<double>(dense_cap)) throw std::length_error("tensor too large for a dense contraction");
    return static_cast<std::size_t>(s);
}

// Row-major linear index: the first tensor factor varies slowest.
inline std::size_t linear_index(const Dimensions& dims, const IndexTuple& t) {
    std::size_t k = 0;
    for (int b = 0; b < dims.d; ++b) k = k * dims.n + (t[b] - 1);
    return k;
}

inline std::vector<cd> to_dense(const ComplexTensor& v) {
    std::vector<cd> out(dense_size(v.dims()), cd(0.0, 0.0));
    for (const auto& [idx, val] : v.entries()) out[linear_index(v.dims(), idx)] = val;
    return out;
}

inline ComplexTensor from_dense(const Dimensions& dims, const std::vector<cd>& data) {
    ComplexTensor v(dims);
    IndexTuple t(std::vector<int>(dims.d, 1));
    for (std::size_t k = 0; k < data.size(); ++k) {
        if (data[k] != cd(0.0, 0.0)) v.set(t, data[k]);
        int b = dims.d - 1;
        while (b >= 0 && t[b] == dims.n) t[b--] = 1;
        if (b >= 0) ++t[b];
    }
    return v;
}

// data <- A applied along mode k.
inline void mode_product(std::vector<cd>& data, const Dimensions& dims, int k, const Eigen::MatrixXcd& A) {
    const std::size_t n = dims.n;
    std::size_t inner = 1;
    for (int b = k + 1; b < dims.d; ++b) inner *= n;
    const std::size_t outer = data.size() / (inner * n);
    Eigen::VectorXcd fiber(n), out(n);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * n * inner + in;
            for (std::size_t i = 0; i < n; ++i) fiber(i) = data[base + i * inner];
            out.noalias() = A * fiber;
            for (std::size_t i = 0; i < n; ++i) data[base + i * inner] = out(i);
        }
}

inline double dense_norm2(const std::vector<cd>& a) {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(x);
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------- actions

inline ComplexTensor apply_torus(const TorusElement& t, const ComplexTensor& v) {
    if (!(t.dims() == v.dims())) throw std::invalid_argument("torus and tensor dimensions differ");
    ComplexTensor out(v.dims());
    for (const auto& [idx, val] : v.entries()) {
        double logscale = 0.0;
        for (int b = 0; b < v.dims().d; ++b) logscale += t.logs()[b](idx[b] - 1);
        out.set(idx, val * std::exp(logscale));
    }
    return out;
}

inline ComplexTensor apply_group(const GroupElement& g, const ComplexTensor& v) {
    if (!(g.dims() == v.dims())) throw std::invalid_argument("group and tensor dimensions differ");
    auto data = detail::to_dense(v);
    for (int k = 0; k < v.dims().d; ++k) detail::mode_product(data, v.dims(), k, g.matrices()[k]);
    return detail::from_dense(v.dims(), data);
}

// ||g . v||^2.
inline double nc_capacity_eval(const ComplexTensor& v, const GroupElement& g) {
    if (!(g.dims() == v.dims())) throw std::invalid_argument("group and tensor dimensions differ");
    auto data = detail::to_dense(v);
    for (int k = 0; k < v.dims().d; ++k) detail::mode_product(data, v.dims(), k, g.matrices()[k]);
    return detail::dense_norm2(data);
}

// <v, (X_1 (x) ... (x) X_d) v> for a tuple of positive-definite matrices.
inline double nc_capacity_eval(const ComplexTensor& v, const std::vector<Eigen::MatrixXcd>& X) {
    if (static_cast<int>(X.size()) != v.dims().d) throw std::invalid_argument("need one matrix per factor");
    auto data = detail::to_dense(v);
    auto orig = data;
    for (int k = 0; k < v.dims().d; ++k) detail::mode_product(data, v.dims(), k, X[k]);
    cd s(0.0, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) s += std::conj(orig[i]) * data[i];
    return s.real();
}

// ---------------------------------------------------------- moment maps

// rho_k = M_k M_k^dagger / |v|^2 for the mode-k flattening M_k.
inline std::vector<Eigen::MatrixXcd> quantum_marginals(const ComplexTensor& v) {
    if (v.empty()) throw std::invalid_argument("quantum marginals of the zero tensor");
    const auto& dims = v.dims();
    const double nv = v.norm2();
    std::vector<Eigen::MatrixXcd> rho;
    for (int k = 0; k < dims.d; ++k) {
        std::map<std::vector<int>, std::vector<std::pair<int, cd>>> fibers;
        for (const auto& [idx, val] : v.entries()) {
            std::vector<int> rest;
            rest.reserve(dims.d - 1);
            for (int b = 0; b < dims.d; ++b)
                if (b != k) rest.push_back(idx[b]);
            fibers[rest].push_back({idx[k] - 1, val});
        }
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dims.n, dims.n);
        for (const auto& [rest, f] : fibers)
            for (const auto& [a, va] : f)
                for (const auto& [b, vb] : f) r(a, b) += va * std::conj(vb);
        rho.push_back(r / nv);
    }
    return rho;
}

inline MomentMapValue moment_map_from_marginals(std::vector<Eigen::MatrixXcd> rho) {
    MomentMapValue m;
    double s = 0.0;
    for (auto& r : rho) {
        const auto n = r.rows();
        r -= Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n);
        s += r.squaredNorm();
    }
    m.components = std::move(rho);
    m.frobenius_norm = std::sqrt(s);
    return m;
}

inline MomentMapValue moment_map_G(const ComplexTensor& v) { return moment_map_from_marginals(quantum_marginals(v)); }

// sum_w (|v_w|^2 / |v|^2) w with w = (eps_{i_1}, ..., eps_{i_d}).
inline Eigen::VectorXd moment_map_T(const ComplexTensor& v) {
    if (v.empty()) throw std::invalid_argument("moment map of the zero tensor");
    const auto& dims = v.dims();
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(dims.length());
    for (const auto& [idx, val] : v.entries()) {
        double w = std::norm(val);
        for (int b = 0; b < dims.d; ++b) {
            mu.segment(b * dims.n, dims.n).array() -= w / dims.n;
            mu(b * dims.n + idx[b] - 1) += w;
        }
    }
    return mu / v.norm2();
}

struct FreeMomentCheck {
    bool ok = true;
    double max_offdiag = 0.0;
};

inline double max_offdiagonal(const std::vector<Eigen::MatrixXcd>& mats) {
    double m = 0.0;
    for (const auto& a : mats)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                if (i != j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

// Marginals of `samples` random torus scalings of v must be diagonal.
inline FreeMomentCheck check_free_moment_equality(const ComplexTensor& v, std::size_t samples, double tol,
                                                  std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    FreeMomentCheck c;
    for (std::size_t s = 0; s < samples; ++s) {
        auto t = TorusElement::random(v.dims(), rng);
        c.max_offdiag = std::max(c.max_offdiag, max_offdiagonal(quantum_marginals(apply_torus(t, v))));
    }
    c.ok = c.max_offdiag <= tol;
    return c;
}

// p_w = |v_w|^2, exact in the dyadic values of the stored doubles.
inline SparseArray tensor_to_array(const ComplexTensor& v) {
    SparseArray a(v.dims());
    for (const auto& [idx, val] : v.entries()) {
        Rational re = from_double(val.real()), im = from_double(val.imag());
        a.set(idx, re * re + im * im);
    }
    return a;
}

// ------------------------------------------------------------ gap witness

struct GapWitnessResult {
    double value = 0.0;  // |mu_T(t . v)| at the returned torus element
    TorusElement torus;
    std::size_t iterations = 0;
    bool converged = false;
    bool scalable = false;  // value <= tol: 0 lies in the moment polytope
};

// For mu_T(t . v) = grad log f_p(2y) with p = |v|^2, minimizes
// psi(z) = |grad log f_p(z)|^2, whose gradient is 2 H(z) grad log f_p(z).
inline GapWitnessResult gap_witness_minimize(const GeometricProgram& prog, double tol = 1e-10,
                                             std::size_t max_iter = 200000) {
    const Eigen::MatrixXd& W = prog.weights();
    auto psi = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
        LogSumExp l(prog, z);
        Eigen::VectorXd s = W * l.grad;
        grad = 2.0 * (W.transpose() * l.softmax.cwiseProduct(s) - l.grad * l.grad.squaredNorm());
        return l.grad.squaredNorm();
    };
    DescentOptions opt;
    opt.tol = 1e-15;
    opt.max_iter = max_iter;
    opt.plateau = 1e-16;
    opt.window = 200;
    auto o = projected_descent(psi, Eigen::VectorXd::Zero(prog.dim()), opt);
    GapWitnessResult r;
    r.value = std::sqrt(std::max(0.0, o.value));
    r.torus = TorusElement::from_flat(prog.dims(), o.x / 2.0);
    r.iterations = o.iterations;
    r.converged = o.converged;
    r.scalable = r.value <= tol;
    return r;
}

inline GapWitnessResult gap_witness_minimize(const ComplexTensor& v, double tol = 1e-10,
                                             std::size_t max_iter = 200000) {
    return gap_witness_minimize(GeometricProgram::from_array(tensor_to_array(v)), tol, max_iter);
}

// ------------------------------------------------------- free diameter

// Gaussian entries, Hermitian part, traceless, then scaled so the tuple has
// Frobenius norm R U with U uniform in (0, 1].
template <class Rng>
std::vector<Eigen::MatrixXcd> random_traceless_hermitian(const Dimensions& dims, double R, Rng& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Eigen::MatrixXcd> H;
    double s = 0.0;
    for (int k = 0; k < dims.d; ++k) {
        Eigen::MatrixXcd A(dims.n, dims.n);
        for (int i = 0; i < dims.n; ++i)
            for (int j = 0; j < dims.n; ++j) A(i, j) = cd(N(rng), N(rng));
        Eigen::MatrixXcd h = (A + A.adjoint()) / 2.0;
        h -= (h.trace() / static_cast<double>(dims.n)) * Eigen::MatrixXcd::Identity(dims.n, dims.n);
        s += h.squaredNorm();
        H.push_back(h);
    }
    double radius = R * (1.0 - U(rng));  // in (0, R]
    for (auto& h : H) h *= radius / std::sqrt(s);
    return H;
}

struct FreeDiameterCheck {
    bool ok = true;
    double torus_optimum = 0.0;
    double min_sample = std::numeric_limits<double>::infinity();
    std::size_t samples = 0;
};

// Samples <v, e^H v> over random H in the Frobenius ball of radius R and
// compares with the torus optimum min over |x| <= R of f_{|v|^2}.
inline FreeDiameterCheck free_diameter_sample_check(const ComplexTensor& v, double R, std::size_t samples,
                                                    double tol, std::uint64_t seed = 0) {
    FreeDiameterCheck c;
    auto prog = GeometricProgram::from_array(tensor_to_array(v));
    c.torus_optimum = capacity_ball(prog, R, 1e-13).value;
    if (R == 0) {
        c.min_sample = v.norm2();
        c.ok = true;
        return c;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        auto H = random_traceless_hermitian(v.dims(), R, rng);
        std::vector<Eigen::MatrixXcd> X;
        for (const auto& h : H) X.push_back(h.exp());
        double val = nc_capacity_eval(v, X);
        c.min_sample = std::min(c.min_sample, val);
        ++c.samples;
    }
    c.ok = c.min_sample >= c.torus_optimum - tol;
    return c;
}

// ---------------------------------------------------------------- quivers

// Representation of the quiver: one complex n x n matrix per arrow, mapping
// the tail space to the head space.
struct QuiverRep {
    int n = 2;
    int d = 2;
    std::vector<int> tails, heads;  // 1-based vertices
    std::vector<Eigen::MatrixXcd> matrices;

    double norm2() const {
        double s = 0.0;
        for (const auto& m : matrices) s += m.squaredNorm();
        return s;
    }
};

// Matrices of the quiver witness; entries are complex Gaussians when rng is
// given and ones otherwise.
template <class Rng>
QuiverRep quiver_rep(const QuiverInstance& q, Rng* rng = nullptr) {
    QuiverRep r;
    r.n = q.n;
    r.d = q.d;
    std::normal_distribution<double> N(0.0, 1.0);
    for (const auto& a : q.arrows) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(q.n, q.n);
        for (const auto& [i, j] : a.ones) m(i - 1, j - 1) = rng ? cd(N(*rng), N(*rng)) : cd(1.0, 0.0);
        r.tails.push_back(a.tail);
        r.heads.push_back(a.head);
        r.matrices.push_back(m);
    }
    return r;
}

// A_a <- t_head A_a t_tail^{-1}.
inline QuiverRep apply_torus(const TorusElement& t, const QuiverRep& rep) {
    QuiverRep out = rep;
    for (std::size_t a = 0; a < rep.matrices.size(); ++a) {
        const auto& lh = t.logs()[rep.heads[a] - 1];
        const auto& lt = t.logs()[rep.tails[a] - 1];
        for (int i = 0; i < rep.n; ++i)
            for (int j = 0; j < rep.n; ++j) out.matrices[a](i, j) *= std::exp(lh(i) - lt(j));
    }
    return out;
}

// Per vertex x: traceless part of (sum_{h(a)=x} A A^dagger - sum_{t(a)=x} A^dagger A) / |A|^2.
inline MomentMapValue moment_map_G(const QuiverRep& rep) {
    const double nv = rep.norm2();
    if (!(nv > 0)) throw std::invalid_argument("moment map of the zero representation");
    std::vector<Eigen::MatrixXcd> comp(rep.d, Eigen::MatrixXcd::Zero(rep.n, rep.n));
    for (std::size_t a = 0; a < rep.matrices.size(); ++a) {
        const auto& A = rep.matrices[a];
        comp[rep.heads[a] - 1] += A * A.adjoint();
        comp[rep.tails[a] - 1] -= A.adjoint() * A;
    }
    MomentMapValue m;
    double s = 0.0;
    for (auto& c : comp) {
        c /= nv;
        c -= (c.trace() / static_cast<double>(rep.n)) * Eigen::MatrixXcd::Identity(rep.n, rep.n);
        s += c.squaredNorm();
    }
    m.components = std::move(comp);
    m.frobenius_norm = std::sqrt(s);
    return m;
}

// Weights with aggregated |entry|^2 as a geometric program: entry (i, j) of an
// arrow has weight +eps_i at the head and -eps_j at the tail.
inline GeometricProgram quiver_program(const QuiverRep& rep) {
    std::map<WeightVector, double> acc;
    for (std::size_t a = 0; a < rep.matrices.size(); ++a)
        for (int i = 0; i < rep.n; ++i)
            for (int j = 0; j < rep.n; ++j) {
                double w = std::norm(rep.matrices[a](i, j));
                if (w == 0.0) continue;
                acc[detail::quiver_weight(rep.n, rep.d, rep.heads[a], i + 1, rep.tails[a], j + 1)] += w;
            }
    WeightSet ws(Dimensions(rep.n, rep.d), "quiver support");
    Eigen::VectorXd c(acc.size());
    std::size_t k = 0;
    for (const auto& [w, v] : acc) {
        ws.add(w);
        c(k++) = v;
    }
    return GeometricProgram(std::move(ws), std::move(c));
}

inline Eigen::VectorXd moment_map_T(const QuiverRep& rep) {
    auto prog = quiver_program(rep);
    return prog.weights().transpose() * (prog.coefficients() / prog.coefficients().sum());
}

inline FreeMomentCheck check_free_moment_equality(const QuiverRep& rep, std::size_t samples, double tol,
                                                  std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    FreeMomentCheck c;
    for (std::size_t s = 0; s < samples; ++s) {
        auto t = TorusElement::random(Dimensions(rep.n, rep.d), rng);
        c.max_offdiag = std::max(c.max_offdiag, max_offdiagonal(moment_map_G(apply_torus(t, rep)).components));
    }
    c.ok = c.max_offdiag <= tol;
    return c;
}

}  // namespace scalebar

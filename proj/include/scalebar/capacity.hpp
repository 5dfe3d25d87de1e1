#pragma once

// Geometric programs f_p(x) = sum_w p_w exp(w . x): log-space evaluation,
// Sinkhorn scaling, unconstrained and ball-constrained capacity solvers,
// rounding bounds and diameter probes.

#include "geometry.hpp"
#include "weights.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace scalebar {

class GeometricProgram {
public:
    GeometricProgram() = default;

    GeometricProgram(WeightSet support, Eigen::VectorXd coefficients)
        : dims_(support.dims()), support_(std::move(support)), coeff_(std::move(coefficients)) {
        if (support_.empty()) throw std::invalid_argument("geometric program with empty support");
        if (static_cast<std::size_t>(coeff_.size()) != support_.size())
            throw std::invalid_argument("coefficient count differs from support size");
        if (!(coeff_.array() > 0).all()) throw std::invalid_argument("coefficients must be positive");
        W_ = to_columns(support_).transpose();
        logc_ = coeff_.array().log();
    }

    // Weights (eps_{i_1}, ..., eps_{i_d}) for each stored entry, in index order.
    static GeometricProgram from_array(const SparseArray& a) {
        if (a.empty()) throw std::invalid_argument("geometric program of an empty array");
        WeightSet ws(a.dims(), "array support");
        Eigen::VectorXd c(a.size());
        std::size_t k = 0;
        for (const auto& [idx, v] : a.entries()) {
            ws.add(weight_of_index(a.dims(), idx));
            c(k++) = to_double(v);
        }
        GeometricProgram g(std::move(ws), std::move(c));
        g.indices_ = a.support();
        return g;
    }

    const Dimensions& dims() const { return dims_; }
    const WeightSet& support() const { return support_; }
    const Eigen::VectorXd& coefficients() const { return coeff_; }
    const Eigen::MatrixXd& weights() const { return W_; }  // one weight per row
    const std::vector<IndexTuple>& indices() const { return indices_; }
    Eigen::Index dim() const { return W_.cols(); }
    std::size_t size() const { return support_.size(); }

private:
    Dimensions dims_;
    WeightSet support_;
    Eigen::VectorXd coeff_;
    Eigen::VectorXd logc_;
    Eigen::MatrixXd W_;
    std::vector<IndexTuple> indices_;

    friend struct LogSumExp;
};

// log f_p(x), gradient and softmax weights in one pass.
struct LogSumExp {
    double value = 0.0;
    Eigen::VectorXd softmax;
    Eigen::VectorXd grad;

    LogSumExp(const GeometricProgram& prog, const Eigen::VectorXd& x, bool with_grad = true) {
        if (x.size() != prog.dim()) throw std::invalid_argument("point dimension mismatch");
        if (!x.allFinite()) throw std::domain_error("non-finite point");
        Eigen::VectorXd z = prog.logc_ + prog.W_ * x;
        double m = z.maxCoeff();
        softmax = (z.array() - m).exp();
        double s = softmax.sum();
        value = m + std::log(s);
        if (with_grad) {
            softmax /= s;
            grad = prog.W_.transpose() * softmax;
        }
    }
};

inline double eval_log_f(const GeometricProgram& prog, const Eigen::VectorXd& x) {
    return LogSumExp(prog, x, false).value;
}

inline Eigen::VectorXd grad_log_f(const GeometricProgram& prog, const Eigen::VectorXd& x) {
    return LogSumExp(prog, x).grad;
}

// ------------------------------------------------------------------ Sinkhorn

struct SinkhornResult {
    std::map<IndexTuple, double> scaled;
    std::vector<std::vector<double>> scalings;  // per axis, per value
    std::vector<double> residuals;              // residuals[s] after s sweeps
    std::size_t sweeps = 0;
    bool converged = false;
};

inline double marginal_residual(const std::map<IndexTuple, double>& a, const Dimensions& dims) {
    double worst = 0.0;
    for (int k = 0; k < dims.d; ++k) {
        std::vector<double> sums(dims.n, 0.0);
        for (const auto& [idx, v] : a) sums[idx[k] - 1] += v;
        for (double s : sums) worst = std::max(worst, std::abs(s - 1.0 / dims.n) * dims.n);
    }
    return worst;
}

// Each sweep rescales the slices of axis 1, 2, ..., d in turn to sum 1/n.
inline SinkhornResult sinkhorn_array(const SparseArray& a, double tol = 1e-10, std::size_t max_sweeps = 10000) {
    if (a.empty()) throw std::invalid_argument("sinkhorn_array on a zero array");
    const auto& dims = a.dims();
    SinkhornResult r;
    for (const auto& [idx, v] : a.entries()) r.scaled[idx] = to_double(v);
    r.scalings.assign(dims.d, std::vector<double>(dims.n, 1.0));
    r.residuals.push_back(marginal_residual(r.scaled, dims));
    while (r.residuals.back() > tol && r.sweeps < max_sweeps) {
        for (int k = 0; k < dims.d; ++k) {
            std::vector<double> sums(dims.n, 0.0);
            for (const auto& [idx, v] : r.scaled) sums[idx[k] - 1] += v;
            std::vector<double> f(dims.n, 1.0);
            for (int i = 0; i < dims.n; ++i)
                if (sums[i] > 0) f[i] = 1.0 / (dims.n * sums[i]);
            for (auto& [idx, v] : r.scaled) v *= f[idx[k] - 1];
            for (int i = 0; i < dims.n; ++i) r.scalings[k][i] *= f[i];
        }
        ++r.sweeps;
        r.residuals.push_back(marginal_residual(r.scaled, dims));
    }
    r.converged = r.residuals.back() <= tol;
    return r;
}

// ---------------------------------------------------------- descent engine

struct DescentOptions {
    double tol = 1e-10;                 // gradient (or projected-gradient) norm target
    std::size_t max_iter = 1000000;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    std::size_t window = 50;            // plateau window
    double plateau = 1e-14;             // relative objective change over the window
    double radius = -1.0;               // project onto the ball when >= 0
    double floor = -std::numeric_limits<double>::infinity();  // stop once the objective drops below
};

struct DescentOutcome {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd grad;
    double stationarity = 0.0;  // gradient norm, or projected-gradient norm on the ball
    std::size_t iterations = 0;
    bool converged = false;
    bool below_floor = false;
};

inline Eigen::VectorXd project_ball(const Eigen::VectorXd& x, double R) {
    if (R < 0) return x;
    double n = x.norm();
    return n > R ? Eigen::VectorXd(x * (R / n)) : x;
}

// Projected gradient descent with Barzilai-Borwein trial steps and Armijo
// backtracking; obj(x, grad) returns the objective and fills the gradient.
template <class Objective>
DescentOutcome projected_descent(Objective&& obj, Eigen::VectorXd x0, const DescentOptions& opt) {
    DescentOutcome out;
    out.x = project_ball(x0, opt.radius);
    Eigen::VectorXd g;
    out.value = obj(out.x, g);
    std::deque<double> history{out.value};
    double step = 1.0;
    auto stationarity = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& gr) {
        return opt.radius < 0 ? gr.norm() : (x - project_ball(x - gr, opt.radius)).norm();
    };
    while (true) {
        out.stationarity = stationarity(out.x, g);
        if (out.stationarity <= opt.tol) {
            out.converged = true;
            break;
        }
        if (out.value < opt.floor) {
            out.below_floor = true;
            break;
        }
        if (out.iterations >= opt.max_iter) break;
        ++out.iterations;

        Eigen::VectorXd xn, gn;
        double vn = 0.0;
        bool accepted = false;
        double t = step;
        for (int bt = 0; bt < 80; ++bt, t *= opt.shrink) {
            xn = project_ball(out.x - t * g, opt.radius);
            Eigen::VectorXd dx = xn - out.x;
            if (dx.squaredNorm() == 0.0) break;
            vn = obj(xn, gn);
            if (std::isfinite(vn) && vn <= out.value + opt.armijo_c * g.dot(dx)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.converged = true;  // no representable decrease left
            break;
        }
        Eigen::VectorXd s = xn - out.x, y = gn - g;
        double sy = s.dot(y);
        step = sy > 0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : std::min(2.0 * t, 1e12);
        out.x = std::move(xn);
        g = std::move(gn);
        out.value = vn;

        history.push_back(out.value);
        if (history.size() > opt.window + 1) history.pop_front();
        if (history.size() == opt.window + 1 &&
            std::abs(history.front() - history.back()) <= opt.plateau * std::max(1.0, std::abs(history.back()))) {
            out.converged = true;
            break;
        }
    }
    out.grad = g;
    out.stationarity = stationarity(out.x, g);
    return out;
}

// ------------------------------------------------------------- capacities

struct CapacityOptions {
    double tol = 1e-10;
    std::size_t max_iter = 1000000;
    double floor = 1e-30;  // capacity-zero flag threshold on the value
    std::optional<Eigen::VectorXd> x0;
};

struct CapacityResult {
    double value = 0.0;
    double log_value = 0.0;
    Eigen::VectorXd argmin;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool diverged = false;  // value fell below the floor: capacity 0 suspected
};

namespace detail {
// The objective log f_p(x) with a plateau test on f itself: a change of
// log f by delta is a relative change of f by about delta.
inline auto log_f_objective(const GeometricProgram& prog) {
    return [&prog](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        LogSumExp l(prog, x);
        g = l.grad;
        return l.value;
    };
}
}  // namespace detail

inline CapacityResult capacity_gd(const GeometricProgram& prog, const CapacityOptions& copt = {}) {
    if (!(copt.tol > 0)) throw std::invalid_argument("capacity_gd requires tol > 0");
    DescentOptions opt;
    opt.tol = copt.tol;
    opt.max_iter = copt.max_iter;
    opt.floor = std::log(copt.floor);
    Eigen::VectorXd x0 = copt.x0 ? *copt.x0 : Eigen::VectorXd::Zero(prog.dim());
    auto o = projected_descent(detail::log_f_objective(prog), x0, opt);
    CapacityResult r;
    r.argmin = o.x;
    r.log_value = o.value;
    r.value = std::exp(o.value);
    r.grad_norm = o.grad.norm();
    r.iterations = o.iterations;
    r.diverged = o.below_floor;
    r.converged = o.converged && !o.below_floor;
    return r;
}

inline CapacityResult capacity_gd(const GeometricProgram& prog, double tol, std::size_t max_iter = 1000000) {
    CapacityOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return capacity_gd(prog, o);
}

struct BallResult {
    double value = 0.0;
    Eigen::VectorXd argmin;
    double stationarity = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// min f_p over |x| <= R by projected gradient on log f_p.
inline BallResult capacity_ball(const GeometricProgram& prog, double R, double tol = 1e-12,
                                const std::optional<Eigen::VectorXd>& x0 = std::nullopt,
                                std::size_t max_iter = 200000) {
    if (R < 0) throw std::invalid_argument("capacity_ball requires R >= 0");
    BallResult r;
    if (R == 0) {
        r.argmin = Eigen::VectorXd::Zero(prog.dim());
        r.value = std::exp(eval_log_f(prog, r.argmin));
        r.converged = true;
        return r;
    }
    DescentOptions opt;
    opt.tol = tol;
    opt.radius = R;
    opt.max_iter = max_iter;
    auto o = projected_descent(detail::log_f_objective(prog), x0 ? *x0 : Eigen::VectorXd::Zero(prog.dim()), opt);
    r.argmin = o.x;
    r.value = std::exp(o.value);
    r.stationarity = o.stationarity;
    r.iterations = o.iterations;
    r.converged = o.converged;
    return r;
}

inline std::vector<double> directional_profile(const GeometricProgram& prog, const Eigen::VectorXd& v,
                                               const std::vector<double>& ts) {
    double nv = v.norm();
    if (!(nv > 0)) throw std::invalid_argument("directional_profile requires v != 0");
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(std::exp(eval_log_f(prog, Eigen::VectorXd(-t * v / nv))));
    return out;
}

// log(value - floor) against t by least squares; returns the slope.
inline double profile_log_slope(const std::vector<double>& ts, const std::vector<double>& values, double floor) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double m = static_cast<double>(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        double y = std::log(values[k] - floor);
        st += ts[k];
        sy += y;
        stt += ts[k] * ts[k];
        sty += ts[k] * y;
    }
    return (m * sty - st * sy) / (m * stt - st * st);
}

struct ScalingCertificate {
    bool certified = false;
    Eigen::VectorXd witness;
    double grad_norm = 0.0;
};

// capa(p) > 0 is certified by a point with |grad log f_p| <= bound (bound at most the margin).
inline ScalingCertificate scaling_certificate(const GeometricProgram& prog, double bound,
                                              std::size_t max_iter = 100000) {
    ScalingCertificate c;
    if (!(bound > 0)) {
        c.witness = Eigen::VectorXd::Zero(prog.dim());
        c.grad_norm = grad_log_f(prog, c.witness).norm();
        return c;
    }
    auto r = capacity_gd(prog, bound, max_iter);
    c.witness = r.argmin;
    c.grad_norm = r.grad_norm;
    c.certified = r.grad_norm <= bound;
    return c;
}

// --------------------------------------------------------- rounding bounds

namespace detail {
inline void require_same_support(const GeometricProgram& p, const GeometricProgram& q) {
    if (p.size() != q.size()) throw std::invalid_argument("support mismatch");
    for (std::size_t k = 0; k < p.size(); ++k)
        if (!(p.support()[k] == q.support()[k])) throw std::invalid_argument("support mismatch");
}
}  // namespace detail

struct RoundingCapacityBound {
    double bound = 0.0;  // lower bound on log capa q
    double log_capa_p = 0.0;
    double M0 = 0.0;
    double linf = 0.0;
};

inline RoundingCapacityBound rounding_capacity_bound(const GeometricProgram& p, const GeometricProgram& q,
                                                     std::optional<double> log_capa_p = std::nullopt) {
    detail::require_same_support(p, q);
    RoundingCapacityBound b;
    b.log_capa_p = log_capa_p ? *log_capa_p : capacity_gd(p, 1e-12).log_value;
    b.M0 = q.coefficients().cwiseInverse().maxCoeff();
    b.linf = (p.coefficients() - q.coefficients()).cwiseAbs().maxCoeff();
    b.bound = b.log_capa_p - b.M0 * b.linf;
    return b;
}

struct RoundingBallBound {
    double bound = 0.0;        // lower bound on inf_B f_q
    double capa_q = 0.0;
    double M = 0.0;
    bool hypothesis = false;   // ball value of f_p >= (1 + eps) capa p
};

// ((1 + eps)(1 - M |p-q|_inf) - M |p-q|_1) capa q with M = max(1/q, 1/p).
inline RoundingBallBound rounding_ball_bound(const GeometricProgram& p, const GeometricProgram& q, double eps,
                                             double ball_value_p, std::optional<double> capa_p = std::nullopt,
                                             std::optional<double> capa_q = std::nullopt) {
    detail::require_same_support(p, q);
    RoundingBallBound b;
    double cp = capa_p ? *capa_p : capacity_gd(p, 1e-12).value;
    b.capa_q = capa_q ? *capa_q : capacity_gd(q, 1e-12).value;
    b.M = std::max(q.coefficients().cwiseInverse().maxCoeff(), p.coefficients().cwiseInverse().maxCoeff());
    Eigen::VectorXd diff = (p.coefficients() - q.coefficients()).cwiseAbs();
    b.hypothesis = ball_value_p >= (1 + eps) * cp;
    b.bound = ((1 + eps) * (1 - b.M * diff.maxCoeff()) - b.M * diff.sum()) * b.capa_q;
    return b;
}

// ------------------------------------------------------------ diameter probe

struct DiameterProbeResult {
    std::vector<double> radii;
    std::vector<double> achieved;
    double eps = 0.0;
    double capacity = 0.0;              // reference value
    std::optional<double> R_needed;     // empty: not reached on the grid
};

// achieved(R) = min over |x| <= R of f_p.  Each radius is warm-started from the
// better of the reference minimizer clamped to the ball and the previous solution.
inline DiameterProbeResult diameter_probe(const GeometricProgram& prog, double eps, std::vector<double> radii,
                                          std::optional<CapacityResult> reference = std::nullopt,
                                          double ball_tol = 1e-13) {
    if (!(eps > 0)) throw std::invalid_argument("diameter_probe requires eps > 0");
    std::sort(radii.begin(), radii.end());
    DiameterProbeResult res;
    res.eps = eps;
    res.radii = radii;
    CapacityResult ref = reference ? *reference : capacity_gd(prog, 1e-12);
    res.capacity = ref.value;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(prog.dim());
    double last = std::numeric_limits<double>::infinity();
    for (double R : radii) {
        // Candidates: the reference argmin, the previous ball argmin, and the
        // previous argmin pushed out radially to the new boundary.
        std::vector<Eigen::VectorXd> starts = {project_ball(ref.argmin, R), prev};
        if (prev.norm() > 0) starts.push_back(prev * (R / prev.norm()));
        Eigen::VectorXd start = starts.front();
        for (const auto& s : starts)
            if (eval_log_f(prog, s) < eval_log_f(prog, start)) start = s;
        auto br = capacity_ball(prog, R, ball_tol, start);
        // Larger balls contain smaller ones; keep the tabulated values monotone.
        double v = std::min(br.value, last);
        res.achieved.push_back(v);
        last = v;
        prev = br.argmin;
        if (!res.R_needed && v <= res.capacity + eps) res.R_needed = R;
    }
    return res;
}

}  // namespace scalebar

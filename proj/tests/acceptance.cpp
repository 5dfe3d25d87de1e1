// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <scalebar/scalebar.hpp>
#include <scalebar/verify.hpp>

#include <chrono>
#include <cstdio>
#include <random>

using namespace scalebar;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    bool ok = true;
    std::vector<std::string> details;
    std::vector<std::string> failures;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            failures.push_back(what);
        }
    }
    void run(const std::string& id, const VerifyOptions& opt = {}) {
        auto rs = verify(id, opt);
        std::size_t passed = 0;
        for (const auto& r : rs) {
            if (r.status == Status::pass) ++passed;
            else failures.push_back(id + " " + r.params.dump() + " " + to_string(r.status) + " " + r.measured.dump());
        }
        ok = ok && !rs.empty() && passed == rs.size();
        details.push_back(id + " " + std::to_string(passed) + "/" + std::to_string(rs.size()));
    }
};

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

VerifyOptions range(const std::string& key, int lo, int hi) {
    VerifyOptions o;
    o.ranges[key] = {lo, hi};
    return o;
}

int failures = 0;

template <typename F>
void criterion(int number, const std::string& name, double time_limit, F&& body) {
    Criterion c;
    auto t0 = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    double t = seconds(t0);
    if (time_limit > 0) c.require(t < time_limit, "runtime " + std::to_string(t) + " s exceeds " + std::to_string(time_limit) + " s");
    std::string detail;
    for (const auto& d : c.details) detail += (detail.empty() ? "" : "; ") + d;
    std::printf("%s [%d] %s (%.2f s%s%s)\n", c.ok ? "PASS" : "FAIL", number, name.c_str(), t,
                detail.empty() ? "" : "; ", detail.c_str());
    for (const auto& f : c.failures) std::printf("      %s\n", f.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

GeometricProgram random_program(std::mt19937_64& rng, Dimensions dims, std::size_t count) {
    auto om = omega_full(dims);
    WeightSet ws(dims, "random");
    std::vector<std::size_t> order(om.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < std::min(count, om.size()); ++k) ws.add(om[order[k]]);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    Eigen::VectorXd c(ws.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = U(rng);
    return GeometricProgram(ws, c);
}

}  // namespace

int main() {
    criterion(1, "Kravtsov marginals, n = 3..20", 1.0, [](Criterion& c) { c.run("kravtsov", range("n", 3, 20)); });

    criterion(2, "margin witnesses", 60.0, [](Criterion& c) {
        c.run("margin-a", range("d", 3, 20));
        c.run("margin-b", range("n", 3, 14));
        VerifyOptions o;
        o.ranges["n"] = {3, 5};
        o.ranges["r"] = {2, 3};
        c.run("margin-c", o);
    });

    criterion(3, "freeness", 0, [](Criterion& c) {
        c.run("wn-free", range("n", 3, 14));
        c.run("qubit-free", range("d", 3, 21));
        c.run("stacked-aff");
        c.run("gamma4");
        auto [a, b] = quiver_nonfree_pair(3, 3);
        WeightSet pair(a.dims(), "quiver pair");
        pair.add(a);
        pair.add(b);
        bool detected = !is_free_weights(pair).free;
        c.require(detected, "quiver pair reported free");
        c.details.push_back(std::string("quiver pair non-free ") + (detected ? "detected" : "missed"));
    });

    criterion(4, "quiver, n = 2..5, d = 2..8", 0, [](Criterion& c) {
        VerifyOptions o;
        o.ranges["n"] = {2, 5};
        o.ranges["d"] = {2, 8};
        c.run("quiver", o);
    });

    criterion(5, "diameter instance, l = 2..5", 0, [](Criterion& c) {
        c.run("diameter-q", range("l", 2, 5));
        c.run("diameter-kernel", range("l", 2, 5));
        c.run("diameter-sv", range("l", 2, 5));
    });

    criterion(6, "diameter behaviour, l = 2..4", 600.0, [](Criterion& c) {
        c.run("diameter-kernel", range("l", 2, 4));
        c.run("diameter-probe", range("l", 2, 4));
    });

    criterion(7, "rounding and padding", 0, [](Criterion& c) {
        c.run("rounding", range("programs", 20, 20));
        VerifyOptions o;
        o.ranges["t"] = {3, 3};
        o.ranges["n"] = {4, 4};
        c.run("pad", o);
    });

    criterion(8, "moment maps", 0, [](Criterion& c) {
        c.run("free-moment", range("samples", 100, 100));
        c.run("gap-witness");
    });

    criterion(9, "free-diameter sampling, B_5, seed 0", 0, [](Criterion& c) {
        VerifyOptions o;
        o.seed = 0;
        o.ranges["samples"] = {200, 200};
        o.ranges["R"] = {5, 5};
        c.run("free-diameter", o);
    });

    criterion(10, "oracle cross-checks", 0, [](Criterion& c) {
        WeightSet om = omega_full(Dimensions(2, 2));
        auto m = margin_bruteforce(om);
        double err = std::abs(m.margin() - 1.0 / std::sqrt(2.0));
        c.require(err <= 1e-10, "Omega(2,2) margin off by " + std::to_string(err));
        c.details.push_back("Omega(2,2) margin error " + format_decimal(err));

        std::mt19937_64 rng(0);
        double fd_worst = 0;
        for (int trial = 0; trial < 50; ++trial) {
            auto prog = random_program(rng, Dimensions(2 + trial % 3, 2 + trial % 2), 3 + trial % 6);
            std::normal_distribution<double> N(0.0, 1.0);
            Eigen::VectorXd x(prog.dim());
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = N(rng);
            Eigen::VectorXd g = grad_log_f(prog, x);
            const double h = 1e-6;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
                e(i) = h;
                double fd = (eval_log_f(prog, x + e) - eval_log_f(prog, x - e)) / (2 * h);
                fd_worst = std::max(fd_worst, std::abs(g(i) - fd));
            }
        }
        c.require(fd_worst <= 1e-7, "gradient vs finite differences " + format_decimal(fd_worst));
        c.details.push_back("FD worst " + format_decimal(fd_worst));

        double nc_worst = 0;
        std::normal_distribution<double> N(0.0, 1.0);
        for (int trial = 0; trial < 30; ++trial) {
            Dimensions dims(2 + trial % 3, 3);
            ComplexTensor v(dims);
            for (const auto& t : frak_W(dims.n)) v.set(t, {N(rng), N(rng)});
            auto t = TorusElement::random(dims, rng, 0.7);
            auto prog = GeometricProgram::from_array(tensor_to_array(v));
            double direct = nc_capacity_eval(v, GroupElement::from_torus(t));
            double via = std::exp(eval_log_f(prog, 2.0 * t.flat()));
            nc_worst = std::max(nc_worst, std::abs(direct - via) / via);
        }
        c.require(nc_worst <= 1e-10, "torus capacity relative error " + format_decimal(nc_worst));
        c.details.push_back("torus relative error " + format_decimal(nc_worst));
    });

    std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}

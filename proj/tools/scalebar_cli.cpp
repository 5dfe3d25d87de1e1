// scalebar: command-line front end for constructions, geometry, capacity,
// tensor checks and the verification catalog.
//
// Exit codes: 0 success (all checks pass), 1 a check failed, 2 usage or input error.

#include <scalebar/verify.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace scalebar;

struct Globals {
    std::uint64_t seed = 0;
    std::optional<double> tol;
    std::string out;
    std::string format = "json";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double tol_or(const Globals& g, double fallback) { return g.tol ? *g.tol : fallback; }

void emit_text(const Globals& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") std::cout << text;
    else write_file(g.out, text);
}

void emit_json(const Globals& g, const json& j) { emit_text(g, j.dump(2) + "\n"); }

bool want_csv(const Globals& g) { return g.format == "csv"; }

std::string vector_csv(const std::string& name, const Eigen::VectorXd& v) {
    std::ostringstream os;
    os << "k," << name << "\n";
    for (Eigen::Index k = 0; k < v.size(); ++k) os << (k + 1) << "," << format_decimal(v(k)) << "\n";
    return os.str();
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json rvec_json(const RationalVector& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_pq(x));
    return a;
}

// Key=lo..hi or key=v.
std::pair<std::string, IntRange> parse_range(const std::string& s) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("range '" + s + "' is not of the form key=lo..hi");
    std::string key = s.substr(0, eq), val = s.substr(eq + 1);
    IntRange r;
    try {
        auto dots = val.find("..");
        if (dots == std::string::npos) {
            r.lo = r.hi = std::stoi(val);
        } else {
            r.lo = std::stoi(val.substr(0, dots));
            r.hi = std::stoi(val.substr(dots + 2));
        }
    } catch (const std::logic_error&) {
        throw UsageError("range '" + s + "' has a non-integer bound");
    }
    return {key, r};
}

json matrix_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    Globals g;
    CLI::App app{"scalebar: margins, gaps, capacities and diameter bounds for scaling problems"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", g.seed, "seed for randomized steps (default 0)");
    app.add_option("--tol", g.tol, "solver tolerance");
    app.add_option("--out", g.out, "output path (default stdout)");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));

    int exit_code = 0;

    // ----------------------------------------------------------- construct
    std::string family;
    int n = 3, d = 3, r = 2, l = 2, t = 3, bits = 64;
    auto* construct = app.add_subcommand("construct", "build a witness weight set, array or tensor");
    construct
        ->add_option("family", family,
                     "omega|qubit|kravtsov|gamma3|stacked|gamma4|pad|poly|quiver|diameter|pad-diameter|round-tensor")
        ->required()
        ->check(CLI::IsMember({"omega", "qubit", "kravtsov", "gamma3", "stacked", "gamma4", "pad", "poly", "quiver",
                               "diameter", "pad-diameter", "round-tensor"}));
    construct->add_option("--n", n, "group size n");
    construct->add_option("--d", d, "number of tensor factors (degree for poly)");
    construct->add_option("--r", r, "stacking or padding parameter");
    construct->add_option("--l", l, "diameter level");
    construct->add_option("--t", t, "size of the array being padded (pad-diameter checks n >= t)");
    construct->add_option("--bits", bits, "rounding bits for round-tensor");
    construct->callback([&] {
        auto emit_ws = [&](const WeightSet& ws) { want_csv(g) ? emit_text(g, weightset_csv(ws)) : emit_json(g, to_json(ws)); };
        auto emit_arr = [&](const SparseArray& a) { want_csv(g) ? emit_text(g, array_csv(a)) : emit_json(g, to_json(a)); };
        if (family == "omega") emit_ws(omega_full(Dimensions(n, d)));
        else if (family == "qubit") emit_ws(gamma_qubit(d));
        else if (family == "kravtsov") emit_arr(kravtsov_lambda(n).lambda);
        else if (family == "gamma3") emit_ws(gamma_3(n));
        else if (family == "stacked") emit_ws(gamma_stacked(n, r));
        else if (family == "gamma4") emit_ws(gamma_4(n));
        else if (family == "pad") emit_ws(pad_weightset(gamma_3(n), r));
        else if (family == "poly") emit_ws(omega_poly(n, d).omega_prime);
        else if (family == "quiver") emit_ws(quiver_instance(n, d).gamma);
        else if (family == "diameter") emit_arr(diameter_instance(l).p);
        else if (family == "pad-diameter") {
            auto p = diameter_instance(l).p;
            if (n < p.dims().n) throw UsageError("pad-diameter needs --n >= " + std::to_string(p.dims().n));
            emit_arr(pad_diameter_array(p, n));
        } else {
            auto rt = rounded_tensor(diameter_instance(l).p, bits);
            want_csv(g) ? emit_text(g, tensor_csv(rt.tensor)) : emit_json(g, to_json(rt.tensor));
        }
    });

    // ------------------------------------------------------------- geometry
    std::string input;
    bool exact = false;
    auto* minnorm = app.add_subcommand("minnorm", "min-norm point of conv(weightset) with separation certificate");
    minnorm->add_option("input", input, "weightset.json")->required();
    minnorm->add_flag("--exact", exact, "polish the result in exact rational arithmetic");
    minnorm->callback([&] {
        auto ws = weightset_from_json(read_json_file(input));
        MinNormOptions opt;
        opt.tol = tol_or(g, 1e-12);
        opt.exact_polish = exact;
        auto res = min_norm_point(ws, opt);
        json j;
        j["size"] = ws.size();
        j["distance"] = res.distance;
        j["zero_in_hull"] = res.zero_in_hull;
        j["converged"] = res.converged;
        j["iterations"] = res.iterations;
        j["point"] = vec_json(res.point);
        j["coefficients"] = vec_json(res.coefficients);
        if (!res.zero_in_hull) {
            j["separator"] = vec_json(res.separator);
            j["margin"] = res.margin;
            j["separation_exact"] = to_pq(exact_separation(res.separator, ws));
        }
        if (res.exact) {
            j["distance2"] = to_pq(res.exact->distance2);
            j["exact_point"] = rvec_json(res.exact->point);
        }
        want_csv(g) ? emit_text(g, vector_csv("point", res.point)) : emit_json(g, j);
    });

    std::size_t cap = 20;
    auto* margin = app.add_subcommand("margin", "brute-force margin over all subsets (small sets)");
    margin->add_option("input", input, "weightset.json")->required();
    margin->add_flag("--exact", exact, "report the exact squared margin as p/q");
    margin->add_option("--cap", cap, "largest set size accepted");
    margin->callback([&] {
        auto ws = weightset_from_json(read_json_file(input));
        auto m = margin_bruteforce(ws, cap);
        json j;
        j["margin"] = m.margin();
        if (exact) j["margin2"] = to_pq(m.margin2);
        j["subset"] = m.subset;
        emit_json(g, j);
    });

    auto* affhull = app.add_subcommand("affhull", "exact membership of 0 in aff and conv of a weight set");
    affhull->add_option("input", input, "weightset.json")->required();
    affhull->callback([&] {
        auto rows = to_rational_rows(weightset_from_json(read_json_file(input)));
        auto a = in_affine_hull_zero(rows);
        auto c = in_convex_hull_zero(rows);
        json j;
        j["affine_member"] = a.member;
        j["rank"] = a.rank;
        if (a.member) j["affine_coefficients"] = rvec_json(a.coefficients);
        j["convex_member"] = c.member;
        if (c.member) j["convex_coefficients"] = rvec_json(c.coefficients);
        else {
            j["separator"] = rvec_json(c.separator);
            j["separation"] = to_pq(c.separation);
        }
        emit_json(g, j);
    });

    double zero_tol = -1.0;
    auto* svmin = app.add_subcommand("svmin", "smallest nonzero singular value of a dense matrix CSV");
    svmin->add_option("input", input, "matrix.csv")->required();
    svmin->add_option("--zero-tol", zero_tol, "values at or below count as zero (default 1e-6 sigma_max)");
    svmin->callback([&] {
        auto s = smallest_nonzero_singular_value(parse_matrix_csv(read_file(input)), zero_tol);
        if (want_csv(g)) return emit_text(g, vector_csv("singular_value", s.singular_values));
        emit_json(g, {{"sigma_min_nonzero", s.sigma_min_nonzero},
                      {"zero_count", s.zero_count},
                      {"singular_values", vec_json(s.singular_values)}});
    });

    // ------------------------------------------------------------- capacity
    std::optional<double> radius;
    std::size_t max_iter = 1000000;
    auto* capacity = app.add_subcommand("capacity", "capacity of an array, globally or over a ball");
    capacity->add_option("input", input, "array.json")->required();
    capacity->add_option("--radius", radius, "minimize over the ball of this radius");
    capacity->add_option("--max-iter", max_iter, "iteration cap");
    capacity->callback([&] {
        auto prog = GeometricProgram::from_array(array_from_json(read_json_file(input)));
        json j;
        if (radius) {
            auto b = capacity_ball(prog, *radius, tol_or(g, 1e-12), std::nullopt, max_iter);
            j = {{"radius", *radius},       {"value", b.value},         {"argmin", vec_json(b.argmin)},
                 {"stationarity", b.stationarity}, {"iterations", b.iterations}, {"converged", b.converged}};
        } else {
            auto c = capacity_gd(prog, tol_or(g, 1e-12), max_iter);
            j = {{"value", c.value},         {"log_value", c.log_value},   {"argmin", vec_json(c.argmin)},
                 {"grad_norm", c.grad_norm}, {"iterations", c.iterations}, {"converged", c.converged},
                 {"diverged", c.diverged}};
        }
        emit_json(g, j);
    });

    std::size_t max_sweeps = 10000;
    auto* sinkhorn = app.add_subcommand("sinkhorn", "alternating slice normalization of an array");
    sinkhorn->add_option("input", input, "array.json")->required();
    sinkhorn->add_option("--max-sweeps", max_sweeps, "sweep cap");
    sinkhorn->callback([&] {
        auto a = array_from_json(read_json_file(input));
        auto s = sinkhorn_array(a, tol_or(g, 1e-10), max_sweeps);
        if (want_csv(g)) {
            std::ostringstream os;
            os << "sweep,residual\n";
            for (std::size_t k = 0; k < s.residuals.size(); ++k) os << k << "," << format_decimal(s.residuals[k]) << "\n";
            return emit_text(g, os.str());
        }
        json scaled = json::array();
        for (const auto& [idx, v] : s.scaled) scaled.push_back({{"idx", idx.indices}, {"val", v}});
        emit_json(g, {{"converged", s.converged}, {"sweeps", s.sweeps},
                      {"residual", s.residuals.empty() ? 0.0 : s.residuals.back()},
                      {"scalings", s.scalings}, {"scaled", scaled}});
    });

    double eps = 1e-6, rmin = 1.0, rmax = 100.0, factor = 1.05;
    auto* probe = app.add_subcommand("probe", "diameter probe: min over balls of growing radius");
    probe->add_option("input", input, "array.json")->required();
    probe->add_option("--eps", eps, "target accuracy");
    probe->add_option("--rmin", rmin, "smallest radius");
    probe->add_option("--rmax", rmax, "largest radius");
    probe->add_option("--factor", factor, "geometric grid factor");
    std::optional<double> reference;
    probe->add_option("--reference", reference, "known capacity value (otherwise solved)");
    probe->callback([&] {
        if (!(rmin > 0) || rmax < rmin || !(factor > 1)) throw UsageError("probe grid needs 0 < rmin <= rmax, factor > 1");
        auto prog = GeometricProgram::from_array(array_from_json(read_json_file(input)));
        auto ref = capacity_gd(prog, tol_or(g, 1e-12));
        if (reference) ref.value = *reference;
        auto res = diameter_probe(prog, eps, detail::geometric_grid(rmin, rmax, factor), ref);
        want_csv(g) ? emit_text(g, probe_csv(res)) : emit_json(g, to_json(res));
    });

    std::string direction;
    double tmax = 40.0;
    int steps = 20;
    int diameter_l = 0;
    auto* profile = app.add_subcommand("profile", "f_p along a ray t -> t v");
    profile->add_option("input", input, "array.json")->required();
    profile->add_option("--direction", direction, "comma-separated direction v");
    profile->add_option("--diameter-l", diameter_l, "use the kernel descent direction of the diameter instance at level l");
    profile->add_option("--tmax", tmax, "largest t");
    profile->add_option("--steps", steps, "number of t values");
    profile->callback([&] {
        auto prog = GeometricProgram::from_array(array_from_json(read_json_file(input)));
        Eigen::VectorXd v;
        if (diameter_l > 0) {
            auto dv = diameter_instance(diameter_l).descent_direction();
            v = Eigen::Map<Eigen::VectorXd>(dv.data(), static_cast<Eigen::Index>(dv.size()));
        } else if (!direction.empty()) {
            v = parse_matrix_csv(direction).row(0).transpose();
        } else {
            throw UsageError("profile needs --direction or --diameter-l");
        }
        if (v.size() != static_cast<Eigen::Index>(prog.dim()))
            throw UsageError("direction has length " + std::to_string(v.size()) + ", program dimension is " +
                             std::to_string(prog.dim()));
        if (steps < 2) throw UsageError("profile needs --steps >= 2");
        std::vector<double> ts;
        for (int k = 1; k <= steps; ++k) ts.push_back(tmax * k / steps);
        auto vals = directional_profile(prog, v, ts);
        if (want_csv(g)) {
            std::ostringstream os;
            os << "t,value\n";
            for (std::size_t k = 0; k < ts.size(); ++k) os << format_decimal(ts[k]) << "," << format_decimal(vals[k]) << "\n";
            return emit_text(g, os.str());
        }
        emit_json(g, {{"t", ts}, {"value", vals}});
    });

    double bound = 1e-3;
    auto* certify = app.add_subcommand("certify", "certify capa > 0 by a point with small gradient");
    certify->add_option("input", input, "array.json")->required();
    certify->add_option("--bound", bound, "gradient norm target (at most the margin)");
    certify->callback([&] {
        auto prog = GeometricProgram::from_array(array_from_json(read_json_file(input)));
        auto c = scaling_certificate(prog, bound);
        emit_json(g, {{"certified", c.certified}, {"grad_norm", c.grad_norm}, {"witness", vec_json(c.witness)}});
        if (!c.certified) exit_code = 1;
    });

    // --------------------------------------------------------------- tensor
    auto* marginals = app.add_subcommand("marginals", "quantum marginals of a tensor");
    marginals->add_option("input", input, "tensor.json")->required();
    marginals->callback([&] {
        auto rho = quantum_marginals(tensor_from_json(read_json_file(input)));
        json a = json::array();
        for (const auto& m : rho) a.push_back(matrix_json(m));
        emit_json(g, {{"marginals", a}, {"max_offdiag", max_offdiagonal(rho)}});
    });

    auto* momentmap = app.add_subcommand("momentmap", "moment maps mu_G and mu_T of a tensor");
    momentmap->add_option("input", input, "tensor.json")->required();
    momentmap->callback([&] {
        auto v = tensor_from_json(read_json_file(input));
        auto mg = moment_map_G(v);
        auto mt = moment_map_T(v);
        if (want_csv(g)) return emit_text(g, vector_csv("mu_T", mt));
        emit_json(g, {{"mu_G_norm", mg.frobenius_norm}, {"mu_T_norm", mt.norm()}, {"mu_T", vec_json(mt)}});
    });

    std::size_t gw_iter = 200000;
    auto* gapwitness = app.add_subcommand("gapwitness", "minimize |mu_T| over the torus orbit");
    gapwitness->add_option("input", input, "tensor.json")->required();
    gapwitness->add_option("--max-iter", gw_iter, "iteration cap");
    gapwitness->callback([&] {
        auto res = gap_witness_minimize(tensor_from_json(read_json_file(input)), tol_or(g, 1e-10), gw_iter);
        emit_json(g, {{"value", res.value},
                      {"scalable", res.scalable},
                      {"converged", res.converged},
                      {"iterations", res.iterations},
                      {"torus_logs", vec_json(res.torus.flat())}});
    });

    double fd_R = 5.0;
    std::size_t samples = 200;
    auto* fdcheck = app.add_subcommand("fdcheck", "sample B_R against the torus-ball optimum");
    fdcheck->add_option("input", input, "tensor.json")->required();
    fdcheck->add_option("--R", fd_R, "ball radius");
    fdcheck->add_option("--samples", samples, "number of random points");
    fdcheck->callback([&] {
        std::cerr << "seed: " << g.seed << "\n";
        auto c = free_diameter_sample_check(tensor_from_json(read_json_file(input)), fd_R, samples, tol_or(g, 1e-9), g.seed);
        emit_json(g, {{"ok", c.ok}, {"torus_optimum", c.torus_optimum}, {"min_sample", c.min_sample},
                      {"samples", c.samples}, {"seed", g.seed}});
        if (!c.ok) exit_code = 1;
    });

    // --------------------------------------------------------------- verify
    std::vector<std::string> checks, ranges;
    bool list = false;
    auto* verify_cmd = app.add_subcommand("verify", "run checks from the catalog (all when none given)");
    verify_cmd->add_option("checks", checks, "check ids");
    verify_cmd->add_option("--range", ranges, "parameter range key=lo..hi (repeatable)");
    verify_cmd->add_flag("--list", list, "list the catalog");
    verify_cmd->callback([&] {
        if (list) {
            std::ostringstream os;
            for (const auto& c : verification_catalog()) os << c.id << "\t" << c.summary << "\n";
            return emit_text(g, os.str());
        }
        VerifyOptions opt;
        opt.seed = g.seed;
        for (const auto& s : ranges) opt.ranges.insert(parse_range(s));
        if (checks.empty())
            for (const auto& c : verification_catalog()) checks.push_back(c.id);
        for (const auto& id : checks)
            if (!find_check(id)) throw UsageError("unknown check '" + id + "'; catalog: " + catalog_ids());
        std::cerr << "seed: " << g.seed << "\n";
        std::vector<VerificationReport> all;
        for (const auto& id : checks) {
            auto rs = verify(id, opt);
            for (const auto& rep : rs)
                std::cerr << to_string(rep.status) << "  " << rep.check << " " << rep.params.dump() << "\n";
            all.insert(all.end(), rs.begin(), rs.end());
        }
        want_csv(g) ? emit_text(g, reports_csv(all)) : emit_json(g, to_json(all));
        bool failed = std::any_of(all.begin(), all.end(), [](const VerificationReport& x) { return x.status == Status::fail; });
        if (failed) exit_code = 1;
    });

    // ----------------------------------------------------------------- emit
    auto* emit = app.add_subcommand("emit", "re-emit a weightset, array, tensor or report file as json or csv");
    emit->add_option("input", input, "input json")->required();
    emit->callback([&] {
        json j = read_json_file(input);
        if (j.is_array()) {
            std::vector<VerificationReport> rs;
            for (const auto& e : j) rs.push_back(report_from_json(e));
            return want_csv(g) ? emit_text(g, reports_csv(rs)) : emit_json(g, to_json(rs));
        }
        if (j.contains("elements")) {
            auto ws = weightset_from_json(j);
            return want_csv(g) ? emit_text(g, weightset_csv(ws)) : emit_json(g, to_json(ws));
        }
        if (j.contains("entries")) {
            const auto& es = j.at("entries");
            bool is_tensor = !es.empty() && !es.front().contains("val");
            if (is_tensor) {
                auto v = tensor_from_json(j);
                return want_csv(g) ? emit_text(g, tensor_csv(v)) : emit_json(g, to_json(v));
            }
            auto a = array_from_json(j);
            return want_csv(g) ? emit_text(g, array_csv(a)) : emit_json(g, to_json(a));
        }
        if (j.contains("radii")) {
            DiameterProbeResult p;
            p.radii = j.at("radii").get<std::vector<double>>();
            p.achieved = j.at("achieved").get<std::vector<double>>();
            p.eps = j.value("eps", 0.0);
            p.capacity = j.value("capacity", 0.0);
            if (j.contains("R_needed") && j.at("R_needed").is_number()) p.R_needed = j.at("R_needed").get<double>();
            return want_csv(g) ? emit_text(g, probe_csv(p)) : emit_json(g, to_json(p));
        }
        throw UsageError(input + ": not a weightset, array, tensor, probe or report list");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

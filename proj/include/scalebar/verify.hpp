#pragma once

// Catalog of verification checks.  Every check turns one claimed bound or
// identity into a list of reports, one per parameter value.

#include "capacity.hpp"
#include "constructions.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "tensor.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace scalebar {

enum class Status { pass, fail, skipped };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        default: return "skipped";
    }
}

struct VerificationReport {
    std::string check;
    json params = json::object();
    Status status = Status::skipped;
    json measured = json::object();
    json bound = json::object();
    double runtime = 0.0;  // seconds
    json counterexample;   // set on failure
    std::string note;
};

struct IntRange {
    int lo = 0;
    int hi = -1;
};

struct VerifyOptions {
    std::map<std::string, IntRange> ranges;  // overrides of the default parameter ranges
    std::uint64_t seed = 0;
};

struct CheckSpec {
    std::string id;
    std::string summary;
    std::map<std::string, IntRange> defaults;    // parameter -> default range
    std::map<std::string, IntRange> supported;   // parameter -> supported range
    std::function<std::vector<VerificationReport>(const std::map<std::string, IntRange>&, std::uint64_t)> run;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline VerificationReport make_report(std::string check, json params) {
    VerificationReport r;
    r.check = std::move(check);
    r.params = std::move(params);
    return r;
}

inline void finish(VerificationReport& r, bool ok, Clock::time_point t0, json counterexample = nullptr) {
    r.status = ok ? Status::pass : Status::fail;
    r.runtime = seconds_since(t0);
    if (!ok) r.counterexample = counterexample.is_null() ? json(r.measured) : std::move(counterexample);
}

// Exact distance check for a margin witness: 0 outside aff(ws), exact Wolfe
// distance^2 in (0, bound2], and a separator verified in rational arithmetic.
inline VerificationReport margin_witness(const std::string& id, json params, const WeightSet& ws, const Rational& bound2) {
    auto t0 = Clock::now();
    auto r = make_report(id, std::move(params));
    auto aff = in_affine_hull_zero(to_rational_rows(ws));
    MinNormOptions opt;
    opt.tol = 1e-12;
    opt.exact_polish = true;
    auto mn = min_norm_point(ws, opt);
    const Rational d2 = mn.exact->distance2;
    // The exact min-norm point h satisfies h . x >= |h|^2 for all x in ws.
    Rational hmin;
    bool first = true;
    for (const auto& row : to_rational_rows(ws)) {
        Rational s = dot(mn.exact->point, row);
        if (first || s < hmin) hmin = s;
        first = false;
    }
    Rational float_sep = exact_separation(mn.separator, ws);
    bool cert = hmin >= d2 && d2 > 0 && float_sep > 0;
    r.measured = {{"size", ws.size()},
                  {"affine_member", aff.member},
                  {"distance", mn.distance},
                  {"distance2", to_pq(d2)},
                  {"separation_exact", to_double(hmin) / std::sqrt(to_double(d2))},
                  {"separation_float_lower", to_double(float_sep) / mn.separator.norm()}};
    r.bound = {{"distance", std::sqrt(to_double(bound2))}, {"distance2", to_pq(bound2)}};
    finish(r, !aff.member && cert && d2 <= bound2, t0);
    return r;
}

inline bool in_range(const IntRange& r, int v) { return v >= r.lo && v <= r.hi; }

template <class F>
void for_range(const std::map<std::string, IntRange>& ranges, const std::string& key, F&& f) {
    const auto& r = ranges.at(key);
    for (int v = r.lo; v <= r.hi; ++v) f(v);
}

inline ComplexTensor unit_tensor(const Dimensions& dims, const std::vector<IndexTuple>& idx) {
    ComplexTensor v(dims);
    for (const auto& t : idx) v.set(t, {1.0, 0.0});
    return v;
}

template <class Rng>
ComplexTensor random_tensor_on(const Dimensions& dims, const std::vector<IndexTuple>& idx, Rng& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    ComplexTensor v(dims);
    for (const auto& t : idx) v.set(t, {N(rng), N(rng)});
    return v;
}

inline Eigen::MatrixXd diameter_matrix(const DiameterInstance& I) {
    Eigen::MatrixXd M(I.M.size(), I.M.front().size());
    for (std::size_t i = 0; i < I.M.size(); ++i)
        for (std::size_t j = 0; j < I.M[i].size(); ++j) M(i, j) = I.M[i][j];
    return M;
}

// eta = dist(omega', aff(Omega_0')) in weight coordinates.
inline double diameter_eta(const DiameterInstance& I) {
    auto prog = GeometricProgram::from_array(I.p);
    const auto& W = prog.weights();
    Eigen::VectorXd target;
    std::vector<Eigen::Index> rest;
    for (std::size_t k = 0; k < prog.size(); ++k) {
        if (prog.indices()[k] == I.omega_prime) target = W.row(k).transpose();
        else rest.push_back(static_cast<Eigen::Index>(k));
    }
    Eigen::MatrixXd X(W.cols(), rest.size());
    for (std::size_t c = 0; c < rest.size(); ++c) X.col(c) = W.row(rest[c]).transpose();
    return dist_to_affine_hull(target, X).distance;
}

inline std::vector<double> geometric_grid(double lo, double hi, double factor) {
    std::vector<double> g;
    for (double R = lo; R <= hi * (1 + 1e-12); R *= factor) g.push_back(R);
    return g;
}

struct DiameterBehaviour {
    double eta = 0.0;
    double slope = 0.0;
    CapacityResult gd;
    DiameterProbeResult probe;
};

// Profile, capacity and probe of the diameter instance at level l.
inline DiameterBehaviour diameter_behaviour(int l, double eps) {
    DiameterBehaviour b;
    auto I = diameter_instance(l);
    auto prog = GeometricProgram::from_array(I.p);
    b.eta = diameter_eta(I);
    auto dv = I.descent_direction();
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(dv.data(), static_cast<Eigen::Index>(dv.size()));
    std::vector<double> ts;
    for (int k = 1; k <= 20; ++k) ts.push_back(k * 2.0);
    auto prof = directional_profile(prog, v, ts);
    b.slope = profile_log_slope(ts, prof, 0.5);
    CapacityOptions co;
    co.tol = 1e-12;
    b.gd = capacity_gd(prog, co);
    CapacityResult ref = b.gd;
    ref.value = 0.5;  // the infimum, approached along the kernel direction
    double reach = 4.0 * std::log(0.5 / eps) / b.eta;
    b.probe = diameter_probe(prog, eps, geometric_grid(1.0, reach, 1.05), ref);
    return b;
}

inline Eigen::VectorXd to_vector(const std::vector<Rational>& v) {
    Eigen::VectorXd x(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) x(k) = to_double(v[k]);
    return x;
}

}  // namespace detail

// ------------------------------------------------------------------ catalog

inline const std::vector<CheckSpec>& verification_catalog() {
    using detail::Clock;
    using detail::finish;
    using detail::make_report;
    using Ranges = std::map<std::string, IntRange>;
    using Reports = std::vector<VerificationReport>;

    static const std::vector<CheckSpec> catalog = {
        {"margin-a", "0 outside aff(Gamma_{2,d}) and distance <= 2^(-d/2+1)", {{"d", {3, 20}}}, {{"d", {3, 26}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "d", [&](int d) {
                 out.push_back(detail::margin_witness("margin-a", {{"d", d}}, gamma_qubit(d), pow2(-d + 2)));
             });
             return out;
         }},
        {"margin-b", "0 outside aff(Gamma_{n,3}) and distance in (0, 2^(-n+1)]", {{"n", {3, 14}}}, {{"n", {3, 20}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "n", [&](int n) {
                 out.push_back(detail::margin_witness("margin-b", {{"n", n}}, gamma_3(n), pow2(-2 * n + 2)));
             });
             return out;
         }},
        {"margin-c", "0 outside aff(Gamma_{n,6r-3}) and distance <= sqrt6/((n-1)sqrt r) 2^(-r(n-1)+1)",
         {{"n", {3, 5}}, {"r", {2, 3}}}, {{"n", {3, 6}}, {"r", {2, 4}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "n", [&](int n) {
                 detail::for_range(rg, "r", [&](int r) {
                     Rational b2 = make_rational(6, static_cast<long long>(n - 1) * (n - 1) * r) * pow2(-2 * r * (n - 1) + 2);
                     out.push_back(detail::margin_witness("margin-c", {{"n", n}, {"r", r}}, gamma_stacked(n, r), b2));
                 });
             });
             return out;
         }},
        {"kravtsov", "all 3n slice sums of lambda equal 1 exactly; total mass n", {{"n", {3, 20}}}, {{"n", {3, 60}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "n", [&](int n) {
                 auto t0 = Clock::now();
                 auto r = make_report("kravtsov", {{"n", n}});
                 auto k = kravtsov_lambda(n);
                 int bad = 0;
                 json first_bad = nullptr;
                 for (int axis = 0; axis < 3; ++axis)
                     for (int v = 1; v <= n; ++v) {
                         Rational s = k.lambda.slice_sum(axis, v);
                         if (s != 1) {
                             if (!bad) first_bad = {{"axis", axis + 1}, {"value", v}, {"sum", to_pq(s)}};
                             ++bad;
                         }
                     }
                 auto support = k.lambda.support();
                 auto expected = frak_W(n);
                 expected.push_back({1, 1, 1});
                 std::sort(expected.begin(), expected.end());
                 bool support_ok = support == expected;
                 r.measured = {{"slice_equations", 3 * n}, {"violations", bad}, {"total", to_pq(k.lambda.total())},
                               {"support_ok", support_ok}};
                 r.bound = {{"slice_sum", "1/1"}, {"total", to_pq(Rational(n))}};
                 finish(r, bad == 0 && k.lambda.total() == n && support_ok, t0, first_bad);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"stacked-aff", "sigma injective with r-fold values; Gamma_{n,6r-3} free, sized, 0 outside its affine hull",
         {{"n", {3, 5}}, {"r", {2, 3}}}, {{"n", {3, 6}}, {"r", {2, 4}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "n", [&](int n) {
                 detail::for_range(rg, "r", [&](int r) {
                     auto t0 = Clock::now();
                     auto rep = make_report("stacked-aff", {{"n", n}, {"r", r}});
                     auto s = sigma_table(n, r);
                     std::set<std::vector<int>> images(s.table.begin(), s.table.end());
                     bool injective = images.size() == s.table.size();
                     bool counts = true;
                     for (int k = 1; k <= 2 * r - 1; ++k) {
                         std::vector<int> c(n + 1, 0);
                         for (int j = 1; j <= r * n; ++j) ++c[s.component(k, j)];
                         for (int v = 1; v <= n; ++v) counts = counts && c[v] == r;
                     }
                     auto idx = stacked_indices(n, r);
                     auto ws = gamma_stacked(n, r);
                     std::size_t expected = 3 * (r * n - 1) - 2 * (r - 1);
                     bool free = is_free_indices(idx).free;
                     auto aff = in_affine_hull_zero(to_rational_rows(ws));
                     rep.measured = {{"injective", injective}, {"r_fold", counts}, {"size", ws.size()},
                                     {"free", free},           {"affine_member", aff.member}, {"rank", aff.rank}};
                     rep.bound = {{"size", expected}};
                     finish(rep, injective && counts && ws.size() == expected && free && !aff.member, t0);
                     out.push_back(std::move(rep));
                 });
             });
             return out;
         }},
        {"qubit-free", "rows of A_{2r} and Gamma_{2,d} are free (index and root tests agree)", {{"d", {3, 21}}},
         {{"d", {3, 30}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "d", [&](int d) {
                 auto t0 = Clock::now();
                 auto r = make_report("qubit-free", {{"d", d}});
                 auto idx = qubit_indices(d);
                 auto fi = is_free_indices(idx);
                 auto fw = is_free_weights(gamma_qubit(d));
                 r.measured = {{"free_indices", fi.free}, {"free_weights", fw.free}, {"size", idx.size()}};
                 r.bound = {{"free", true}};
                 finish(r, fi.free && fw.free, t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"wn-free", "W_n is free (index and root tests agree)", {{"n", {3, 14}}}, {{"n", {3, 30}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "n", [&](int n) {
                 auto t0 = Clock::now();
                 auto r = make_report("wn-free", {{"n", n}});
                 auto fi = is_free_indices(frak_W(n));
                 auto fw = is_free_weights(gamma_3(n));
                 r.measured = {{"free_indices", fi.free}, {"free_weights", fw.free}};
                 r.bound = {{"free", true}};
                 finish(r, fi.free && fw.free, t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"quiver", "0 outside conv(Gamma_d); explicit combination gives x_d; |x_d| < (n-1)^(-d+1)",
         {{"n", {2, 5}}, {"d", {2, 8}}}, {{"n", {2, 6}}, {"d", {2, 10}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "n", [&](int n) {
                 detail::for_range(rg, "d", [&](int d) {
                     auto t0 = Clock::now();
                     auto r = make_report("quiver", {{"n", n}, {"d", d}});
                     auto q = quiver_instance(n, d);
                     auto rows = to_rational_rows(q.gamma);
                     RationalVector s(n * d, Rational(0));
                     Rational total = 0;
                     bool nonneg = true;
                     for (std::size_t k = 0; k < rows.size(); ++k) {
                         total += q.combination[k];
                         nonneg = nonneg && q.combination[k] >= 0;
                         for (int c = 0; c < n * d; ++c) s[c] += q.combination[k] * rows[k][c];
                     }
                     bool reproduces = nonneg && total == 1 && s == q.x_d;
                     auto cm = in_convex_hull_zero(rows);
                     bool sep_ok = true;
                     if (!cm.member)
                         for (const auto& row : rows) sep_ok = sep_ok && dot(cm.separator, row) >= cm.separation;
                     Rational xx = dot(q.x_d, q.x_d);
                     Rational b2 = 1 / rational_pow(Rational(n - 1), 2 * (d - 1));
                     r.measured = {{"convex_member", cm.member}, {"separator_verified", sep_ok},
                                   {"combination_reproduces_x_d", reproduces}, {"lambda_d", to_pq(q.lambda_d)},
                                   {"norm_x_d", std::sqrt(to_double(xx))}};
                     r.bound = {{"norm", std::sqrt(to_double(b2))}};
                     finish(r, !cm.member && sep_ok && reproduces && xx < b2, t0);
                     out.push_back(std::move(r));
                 });
             });
             return out;
         }},
        {"gamma4", "Gamma_{n,4} free with distance in (0, 2^(-n+1)]; padded sets keep 0 outside conv and freeness",
         {{"n", {3, 8}}}, {{"n", {3, 12}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "n", [&](int n) {
                 auto t0 = Clock::now();
                 auto r = make_report("gamma4", {{"n", n}});
                 auto ws = gamma_4(n);
                 bool free = is_free_indices(gamma_4_indices(n)).free;
                 auto cm = in_convex_hull_zero(to_rational_rows(ws));
                 auto mn = min_norm_point_exact(ws);
                 Rational b2 = pow2(-2 * n + 2);
                 json padded = json::array();
                 bool pad_ok = true;
                 if (n <= 6) {
                     for (int pr = 1; pr <= 3; ++pr) {
                         auto pw = pad_weightset(gamma_3(n), pr);
                         bool pfree = is_free_indices(pad_indices(frak_W(n), n, pr)).free;
                         bool pmember = in_convex_hull_zero(to_rational_rows(pw)).member;
                         pad_ok = pad_ok && !pmember && (pr < 2 || pfree);
                         padded.push_back({{"r", pr}, {"size", pw.size()}, {"free", pfree}, {"convex_member", pmember}});
                     }
                 }
                 r.measured = {{"free", free}, {"convex_member", cm.member}, {"distance", mn.distance()},
                               {"distance2", to_pq(mn.distance2)}, {"padded", padded}};
                 r.bound = {{"distance", std::sqrt(to_double(b2))}};
                 finish(r, free && !cm.member && mn.distance2 > 0 && mn.distance2 <= b2 && pad_ok, t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"poly", "-Gamma_{m,3} embeds in the degree-3 polynomial weights on C^{3m} as a free subset",
         {{"m", {2, 5}}}, {{"m", {2, 6}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "m", [&](int m) {
                 auto t0 = Clock::now();
                 auto r = make_report("poly", {{"m", m}, {"degree", 3}});
                 const int n = 3 * m;
                 auto pw = omega_poly(n, 3);
                 std::size_t expected = static_cast<std::size_t>((n + 2) * (n + 1) * n / 6);
                 WeightSet g = m == 2 ? gamma_qubit(3) : gamma_3(m);
                 Rational b2 = m == 2 ? make_rational(1, 2) : pow2(-2 * m + 2);
                 auto emb = poly_embed_negated(g);
                 bool subset = true;
                 for (const auto& w : emb.elements()) subset = subset && pw.omega_prime.contains(w);
                 bool free = is_free_weights(emb).free;
                 auto mn = min_norm_point_exact(emb);
                 Rational total_zero = 0;
                 bool sums_zero = true;
                 for (const auto& w : pw.omega_prime.elements()) {
                     std::int64_t s = 0;
                     for (auto v : w.scaled()) s += v;
                     sums_zero = sums_zero && s == 0;
                 }
                 r.measured = {{"size", pw.omega_prime.size()}, {"embedded_subset", subset}, {"free", free},
                               {"sums_zero", sums_zero}, {"distance", mn.distance()}};
                 r.bound = {{"size", expected}, {"distance", std::sqrt(to_double(b2))}};
                 finish(r, pw.omega_prime.size() == expected && subset && free && sums_zero && mn.distance2 > 0 &&
                               mn.distance2 <= b2,
                        t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"diameter-q", "D_l counts; q sums to 1; q-weighted column sums of M equal 1/n exactly; 0 in conv(rows)",
         {{"l", {2, 5}}}, {{"l", {2, 8}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "l", [&](int l) {
                 auto t0 = Clock::now();
                 auto r = make_report("diameter-q", {{"l", l}});
                 auto I = diameter_instance(l);
                 const int n = I.n;
                 bool counts = static_cast<int>(I.graph.names.size()) == 3 * (l + 1) &&
                               static_cast<int>(I.graph.edges.size()) == 3 * l + 2 &&
                               static_cast<int>(I.M.size()) == 3 * n - 3;
                 bool rows3 = true;
                 for (const auto& row : I.M) rows3 = rows3 && std::accumulate(row.begin(), row.end(), 0) == 3;
                 Rational qsum = 0;
                 for (const auto& x : I.q) qsum += x;
                 int bad = 0;
                 for (int c = 0; c < 3 * n; ++c) {
                     Rational s = 0;
                     for (std::size_t k = 0; k < I.M.size(); ++k)
                         if (I.M[k][c]) s += I.q[k];
                     if (s != make_rational(1, n)) ++bad;
                 }
                 WeightSet rows(Dimensions(n, 3), "rows");
                 for (const auto& t : I.rows) rows.add(weight_of_index(Dimensions(n, 3), t));
                 bool member = in_convex_hull_zero(to_rational_rows(rows)).member;
                 r.measured = {{"vertices", I.graph.names.size()}, {"edges", I.graph.edges.size()},
                               {"rows_have_three_ones", rows3}, {"q_sum", to_pq(qsum)},
                               {"bad_columns", bad}, {"p_total", to_pq(I.p.total())}, {"zero_in_conv_rows", member}};
                 r.bound = {{"column_sum", to_pq(make_rational(1, n))}, {"vertices", 3 * (l + 1)}, {"edges", 3 * l + 2}};
                 finish(r, counts && rows3 && qsum == 1 && bad == 0 && I.p.total() == 1 && member, t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"diameter-kernel", "M f = 0 exactly; eta = |f.omega'|/|f| from the affine-hull distance; eta halves per level",
         {{"l", {2, 5}}}, {{"l", {2, 8}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "l", [&](int l) {
                 auto t0 = Clock::now();
                 auto r = make_report("diameter-kernel", {{"l", l}});
                 auto I = diameter_instance(l);
                 bool kernel = true;
                 for (const auto& row : I.M) {
                     Rational s = 0;
                     for (std::size_t c = 0; c < row.size(); ++c)
                         if (row[c]) s += I.kernel_f[c];
                     kernel = kernel && s == 0;
                 }
                 double eta = detail::diameter_eta(I);
                 double eta_formula = I.eta();
                 double eta_next = detail::diameter_eta(diameter_instance(l + 1));
                 double ratio = eta / eta_next;
                 bool ok = kernel && std::abs(eta - eta_formula) <= 1e-9 * eta_formula && ratio >= 1.7 && ratio <= 2.3;
                 r.measured = {{"kernel_exact", kernel}, {"eta", eta}, {"eta_formula", eta_formula},
                               {"eta_ratio_next", ratio}};
                 r.bound = {{"eta_ratio", json::array({1.7, 2.3})}};
                 if (l == 2) {
                     r.bound["eta_l2"] = 1.0 / (2.0 * std::sqrt(3.0));
                     ok = ok && std::abs(eta - 1.0 / (2.0 * std::sqrt(3.0))) <= 1e-9;
                 }
                 finish(r, ok, t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"diameter-sv", "M has exactly 3 zero singular values and sigma_min >= 0.1/n", {{"l", {2, 5}}},
         {{"l", {2, 8}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             detail::for_range(rg, "l", [&](int l) {
                 auto t0 = Clock::now();
                 auto r = make_report("diameter-sv", {{"l", l}});
                 auto I = diameter_instance(l);
                 auto sv = smallest_nonzero_singular_value(detail::diameter_matrix(I));
                 r.measured = {{"zero_count", sv.zero_count}, {"sigma_min", sv.sigma_min_nonzero}};
                 r.bound = {{"zero_count", 3}, {"sigma_min", 0.1 / I.n}};
                 finish(r, sv.zero_count == 3 && sv.sigma_min_nonzero >= 0.1 / I.n, t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"diameter-probe",
         "profile slope -eta within 1%; capacity in [1/2, 1/2+1e-6]; R_needed(l+1)/R_needed(l) in [1.4, 2.6]",
         {{"l", {2, 4}}}, {{"l", {2, 5}}},
         [](const Ranges& rg, std::uint64_t) {
             Reports out;
             std::map<int, detail::DiameterBehaviour> memo;
             auto get = [&](int l) -> const detail::DiameterBehaviour& {
                 auto it = memo.find(l);
                 if (it == memo.end()) it = memo.emplace(l, detail::diameter_behaviour(l, 1e-6)).first;
                 return it->second;
             };
             detail::for_range(rg, "l", [&](int l) {
                 auto t0 = Clock::now();
                 auto r = make_report("diameter-probe", {{"l", l}, {"eps", 1e-6}});
                 const auto& b = get(l);
                 const auto& c = get(l + 1);
                 double rel = std::abs(-b.slope - b.eta) / b.eta;
                 bool gd_ok = b.gd.value >= 0.5 && b.gd.value <= 0.5 + 1e-6;
                 bool monotone = true;
                 for (std::size_t k = 1; k < b.probe.achieved.size(); ++k)
                     monotone = monotone && b.probe.achieved[k] <= b.probe.achieved[k - 1];
                 bool never_below = true;
                 for (double a : b.probe.achieved) never_below = never_below && a >= 0.5 - 1e-9;
                 bool reached = b.probe.R_needed.has_value() && c.probe.R_needed.has_value();
                 double ratio = reached ? *c.probe.R_needed / *b.probe.R_needed : 0.0;
                 r.measured = {{"eta", b.eta},
                               {"slope", b.slope},
                               {"slope_rel_error", rel},
                               {"capacity_gd", b.gd.value},
                               {"R_needed", b.probe.R_needed ? json(*b.probe.R_needed) : json("not reached")},
                               {"R_needed_next", c.probe.R_needed ? json(*c.probe.R_needed) : json("not reached")},
                               {"R_ratio", ratio},
                               {"achieved_monotone", monotone}};
                 r.bound = {{"slope_rel_error", 0.01},
                            {"capacity", json::array({0.5, 0.5 + 1e-6})},
                            {"R_ratio", json::array({1.4, 2.6})}};
                 finish(r, rel <= 0.01 && gd_ok && monotone && never_below && reached && ratio >= 1.4 && ratio <= 2.6,
                        t0);
                 out.push_back(std::move(r));
             });
             return out;
         }},
        {"pad", "padding a unit-sum array from [t]^3 to [n]^3 keeps D_{f_q}(eps) >= D_{f_p}(eps')",
         {{"t", {3, 3}}, {"n", {4, 4}}}, {{"t", {2, 4}}, {"n", {2, 6}}},
         [](const Ranges& rg, std::uint64_t seed) {
             Reports out;
             detail::for_range(rg, "t", [&](int t) {
                 detail::for_range(rg, "n", [&](int n) {
                     if (n < t) return;
                     auto t0 = Clock::now();
                     auto r = make_report("pad", {{"t", t}, {"n", n}, {"seed", seed}});
                     std::mt19937_64 rng(seed);
                     std::uniform_real_distribution<double> U(0.2, 1.2);
                     SparseArray pa(Dimensions(t, 3));
                     for (int a = 1; a <= t; ++a)
                         for (int b = 1; b <= t; ++b)
                             for (int c = 1; c <= t; ++c) pa.set({a, b, c}, from_double(U(rng)));
                     Rational total = pa.total();
                     SparseArray unit(Dimensions(t, 3));
                     for (const auto& [idx, v] : pa.entries()) unit.set(idx, v / total);
                     auto qa = pad_diameter_array(unit, n);
                     auto P = GeometricProgram::from_array(unit), Q = GeometricProgram::from_array(qa);
                     auto cp = capacity_gd(P, 1e-12), cq = capacity_gd(Q, 1e-12);
                     const double ex = static_cast<double>(t) / n;
                     auto radii = detail::geometric_grid(0.01, 3.0 * std::max(cp.argmin.norm(), 0.1), 1.05);
                     double curve_gap = std::numeric_limits<double>::infinity();
                     bool order = true;
                     json per_eps = json::array();
                     for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
                         double epsp = cp.value < 1 ? (1 - cp.value) * eps / (1 - std::pow(cp.value, ex)) : eps;
                         auto prq = diameter_probe(Q, eps, radii, cq);
                         auto prp = diameter_probe(P, epsp, radii, cp);
                         for (std::size_t k = 0; k < radii.size(); ++k)
                             curve_gap = std::min(curve_gap, prq.achieved[k] - std::pow(prp.achieved[k], ex));
                         double dq = prq.R_needed ? *prq.R_needed : std::numeric_limits<double>::infinity();
                         double dp = prp.R_needed ? *prp.R_needed : std::numeric_limits<double>::infinity();
                         order = order && dq >= dp;
                         per_eps.push_back({{"eps", eps}, {"eps_p", epsp}, {"D_q", dq}, {"D_p", dp}});
                     }
                     r.measured = {{"q_total", to_pq(qa.total())}, {"capa_p", cp.value}, {"capa_q", cq.value},
                                   {"capa_p_pow", std::pow(cp.value, ex)}, {"curve_gap_min", curve_gap},
                                   {"diameters", per_eps}};
                     r.bound = {{"curve_gap_min", -1e-12}, {"D_q_minus_D_p", 0}};
                     finish(r, qa.total() == 1 && curve_gap >= -1e-12 && order, t0);
                     out.push_back(std::move(r));
                 });
             });
             return out;
         }},
        {"rounding", "capacity and ball rounding bounds on random interior programs; rounded diameter tensor",
         {{"programs", {20, 20}}}, {{"programs", {1, 200}}},
         [](const Ranges& rg, std::uint64_t seed) {
             Reports out;
             const int programs = rg.at("programs").hi;
             std::mt19937_64 rng(seed);
             std::uniform_real_distribution<double> U(0.0, 1.0);
             for (int s = 0; s < programs; ++s) {
                 auto t0 = Clock::now();
                 Dimensions dims = s % 2 ? Dimensions(3, 2) : Dimensions(2, 3);
                 auto r = make_report("rounding", {{"program", s}, {"n", dims.n}, {"d", dims.d}, {"seed", seed}});
                 auto om = omega_full(dims);
                 const auto m = static_cast<Eigen::Index>(om.size());
                 std::vector<double> g(m);
                 double tot = 0;
                 for (auto& x : g) tot += (x = -std::log(1.0 - U(rng)));
                 Eigen::VectorXd p(m), q(m);
                 for (Eigen::Index k = 0; k < m; ++k) {
                     p(k) = 0.05 + (1 - 0.05 * m) * g[k] / tot;
                     q(k) = p(k) + (2 * U(rng) - 1) * 1e-6;
                 }
                 GeometricProgram P(om, p), Q(om, q);
                 auto cp = capacity_gd(P, 1e-12), cq = capacity_gd(Q, 1e-12);
                 auto b1 = rounding_capacity_bound(P, Q, cp.log_value);
                 double R = 0.5 * cp.argmin.norm();
                 auto bp = capacity_ball(P, R, 1e-13), bq = capacity_ball(Q, R, 1e-13);
                 double eps = 0.5 * (bp.value / cp.value - 1);
                 auto b2 = rounding_ball_bound(P, Q, eps, bp.value, cp.value, cq.value);
                 r.measured = {{"log_capa_q", cq.log_value}, {"ball_q", bq.value}, {"eps", eps},
                               {"hypothesis", b2.hypothesis}, {"linf", b1.linf}};
                 r.bound = {{"log_capa_q_lower", b1.bound}, {"ball_q_lower", b2.bound}};
                 finish(r, b2.hypothesis && cq.log_value >= b1.bound && bq.value >= b2.bound, t0);
                 out.push_back(std::move(r));
             }
             {
                 auto t0 = Clock::now();
                 auto r = make_report("rounding", {{"case", "diameter tensor"}, {"l", 2}, {"bits", 64}});
                 auto I = diameter_instance(2);
                 auto rt = rounded_tensor(I.p, 64);
                 bool below = true;
                 for (const auto& [idx, v] : I.p.entries()) below = below && rt.squares.get(idx) <= v;
                 bool support = rt.squares.support() == I.p.support();
                 r.measured = {{"l1_error", to_double(rt.l1_error)}, {"entries_below_p", below}, {"support_equal", support}};
                 r.bound = {{"l1_error", std::ldexp(1.0, -40)}};
                 finish(r, below && support && rt.l1_error >= 0 && rt.l1_error <= pow2(-40), t0);
                 out.push_back(std::move(r));
             }
             {
                 auto t0 = Clock::now();
                 const double eps = 1e-6;
                 auto r = make_report("rounding", {{"case", "diameter p vs rounded q"}, {"l", 2}, {"eps", eps}});
                 auto I = diameter_instance(2);
                 auto rt = rounded_tensor(I.p, 40);
                 auto P = GeometricProgram::from_array(I.p), Q = GeometricProgram::from_array(rt.squares);
                 const double R = 20.0;
                 auto bp = capacity_ball(P, R, 1e-13);
                 auto cq = capacity_gd(Q, 1e-12);
                 auto bq = capacity_ball(Q, R, 1e-13);
                 auto b2 = rounding_ball_bound(P, Q, eps, bp.value, 0.5, cq.value);
                 r.measured = {{"ball_p", bp.value}, {"ball_q", bq.value}, {"capa_q", cq.value}, {"bound", b2.bound},
                               {"hypothesis", b2.hypothesis}, {"linf", (P.coefficients() - Q.coefficients()).cwiseAbs().maxCoeff()}};
                 r.bound = {{"bound_lower", (1 + eps / 2) * cq.value}};
                 finish(r, b2.hypothesis && b2.bound >= (1 + eps / 2) * cq.value && bq.value >= b2.bound, t0);
                 out.push_back(std::move(r));
             }
             return out;
         }},
        {"free-moment", "marginals of torus scalings of free witnesses are diagonal; |mu_T| <= |mu_G|",
         {{"samples", {100, 100}}}, {{"samples", {1, 10000}}},
         [](const Ranges& rg, std::uint64_t seed) {
             Reports out;
             const auto samples = static_cast<std::size_t>(rg.at("samples").hi);
             std::mt19937_64 rng(seed);
             struct Witness {
                 std::string name;
                 Dimensions dims;
                 std::vector<IndexTuple> idx;
             };
             std::vector<Witness> ws;
             for (int d = 3; d <= 8; ++d) ws.push_back({"Gamma(2," + std::to_string(d) + ")", Dimensions(2, d), qubit_indices(d)});
             for (int n = 3; n <= 6; ++n) ws.push_back({"W_" + std::to_string(n), Dimensions(n, 3), frak_W(n)});
             ws.push_back({"Gamma(3,9)", Dimensions(3, 9), stacked_indices(3, 2)});
             for (int n = 3; n <= 4; ++n) ws.push_back({"Gamma(" + std::to_string(n) + ",4)", Dimensions(n, 4), gamma_4_indices(n)});
             ws.push_back({"Gamma(3,3)xDelta2", Dimensions(3, 5), pad_indices(frak_W(3), 3, 2)});
             for (const auto& w : ws) {
                 auto t0 = Clock::now();
                 auto r = make_report("free-moment", {{"witness", w.name}, {"samples", samples}, {"seed", seed}});
                 auto v = detail::random_tensor_on(w.dims, w.idx, rng);
                 auto c = check_free_moment_equality(v, samples, 1e-12, rng());
                 r.measured = {{"max_offdiag", c.max_offdiag}};
                 r.bound = {{"max_offdiag", 1e-12}};
                 finish(r, c.ok, t0);
                 out.push_back(std::move(r));
             }
             {
                 auto t0 = Clock::now();
                 auto r = make_report("free-moment", {{"witness", "rounded diameter tensor"}, {"l", 2}, {"samples", samples}});
                 auto rt = rounded_tensor(diameter_instance(2).p, 64);
                 auto c = check_free_moment_equality(rt.tensor, samples, 1e-12, rng());
                 r.measured = {{"max_offdiag", c.max_offdiag}};
                 r.bound = {{"max_offdiag", 1e-12}};
                 finish(r, c.ok, t0);
                 out.push_back(std::move(r));
             }
             for (int n = 2; n <= 4; ++n)
                 for (int d = 2; d <= 4; ++d) {
                     auto t0 = Clock::now();
                     auto r = make_report("free-moment", {{"witness", "quiver"}, {"n", n}, {"d", d}, {"samples", samples}});
                     auto rep = quiver_rep(quiver_instance(n, d), &rng);
                     auto c = check_free_moment_equality(rep, samples, 1e-12, rng());
                     r.measured = {{"max_offdiag", c.max_offdiag}};
                     r.bound = {{"max_offdiag", 1e-12}};
                     finish(r, c.ok, t0);
                     out.push_back(std::move(r));
                 }
             {
                 auto t0 = Clock::now();
                 auto r = make_report("free-moment", {{"case", "non-free pair detected"}});
                 ComplexTensor v(Dimensions(2, 3));
                 v.set({1, 1, 1}, {1.0, 0.0});
                 v.set({1, 1, 2}, {1.0, 0.0});
                 auto c = check_free_moment_equality(v, samples, 1e-12, rng());
                 r.measured = {{"max_offdiag", c.max_offdiag}};
                 r.bound = {{"max_offdiag_above", 1e-12}};
                 finish(r, !c.ok, t0);
                 out.push_back(std::move(r));
             }
             {
                 auto t0 = Clock::now();
                 auto r = make_report("free-moment", {{"case", "mu_T vs mu_G on dense tensors"}, {"n", 3}, {"d", 3}, {"samples", samples}});
                 std::vector<IndexTuple> all;
                 for (int a = 1; a <= 3; ++a)
                     for (int b = 1; b <= 3; ++b)
                         for (int c = 1; c <= 3; ++c) all.push_back({a, b, c});
                 double worst = -std::numeric_limits<double>::infinity();
                 for (std::size_t s = 0; s < samples; ++s) {
                     auto v = detail::random_tensor_on(Dimensions(3, 3), all, rng);
                     worst = std::max(worst, moment_map_T(v).norm() - moment_map_G(v).frobenius_norm);
                 }
                 r.measured = {{"max_muT_minus_muG", worst}};
                 r.bound = {{"max_muT_minus_muG", 1e-12}};
                 finish(r, worst <= 1e-12, t0);
                 out.push_back(std::move(r));
             }
             return out;
         }},
        {"gap-witness", "torus minimization of |mu_T| matches the min-norm distance within 1e-6", {}, {},
         [](const Ranges&, std::uint64_t) {
             Reports out;
             struct Case {
                 std::string name;
                 Dimensions dims;
                 std::vector<IndexTuple> idx;
             };
             std::vector<Case> cases = {{"Gamma(2,3)", Dimensions(2, 3), qubit_indices(3)},
                                        {"Gamma(3,3)", Dimensions(3, 3), frak_W(3)},
                                        {"Gamma(4,3)", Dimensions(4, 3), frak_W(4)},
                                        {"Gamma(3,9)", Dimensions(3, 9), stacked_indices(3, 2)}};
             for (const auto& c : cases) {
                 auto t0 = Clock::now();
                 auto r = make_report("gap-witness", {{"witness", c.name}});
                 auto v = detail::unit_tensor(c.dims, c.idx);
                 auto ws = weights_of_indices(c.dims, c.idx, c.name).weights;
                 MinNormOptions opt;
                 opt.tol = 1e-12;
                 opt.exact_polish = true;
                 auto mn = min_norm_point(ws, opt);
                 auto gw = gap_witness_minimize(v, 1e-10);
                 double mu_t = moment_map_T(apply_torus(gw.torus, v)).norm();
                 double mu_g = moment_map_G(apply_torus(gw.torus, v)).frobenius_norm;
                 r.measured = {{"gap_witness", gw.value}, {"min_norm", mn.distance}, {"mu_T_at_witness", mu_t},
                               {"mu_G_at_witness", mu_g}, {"iterations", gw.iterations}};
                 r.bound = {{"abs_difference", 1e-6}};
                 finish(r, std::abs(gw.value - mn.distance) <= 1e-6 && std::abs(mu_g - mn.distance) <= 1e-6, t0);
                 out.push_back(std::move(r));
             }
             return out;
         }},
        {"free-diameter", "random points of B_R never undercut the torus-ball optimum of the rounded diameter tensor",
         {{"samples", {200, 200}}, {"R", {5, 5}}}, {{"samples", {1, 100000}}, {"R", {0, 50}}},
         [](const Ranges& rg, std::uint64_t seed) {
             Reports out;
             auto t0 = Clock::now();
             const auto samples = static_cast<std::size_t>(rg.at("samples").hi);
             const double R = rg.at("R").hi;
             auto r = make_report("free-diameter", {{"l", 2}, {"R", R}, {"samples", samples}, {"seed", seed}});
             auto rt = rounded_tensor(diameter_instance(2).p, 64);
             auto c = free_diameter_sample_check(rt.tensor, R, samples, 1e-9, seed);
             r.measured = {{"min_sample", c.min_sample}, {"samples", c.samples}};
             r.bound = {{"torus_optimum_minus_tol", c.torus_optimum - 1e-9}};
             finish(r, c.ok, t0);
             out.push_back(std::move(r));
             return out;
         }},
    };
    return catalog;
}

inline const CheckSpec* find_check(const std::string& id) {
    for (const auto& c : verification_catalog())
        if (c.id == id) return &c;
    return nullptr;
}

inline std::string catalog_ids() {
    std::string s;
    for (const auto& c : verification_catalog()) s += (s.empty() ? "" : ", ") + c.id;
    return s;
}

// Runs one check; requested ranges outside the supported ones yield a skipped report.
inline std::vector<VerificationReport> verify(const std::string& id, const VerifyOptions& opt = {}) {
    const CheckSpec* spec = find_check(id);
    if (!spec) throw std::invalid_argument("unknown check '" + id + "'; catalog: " + catalog_ids());
    auto ranges = spec->defaults;
    for (const auto& [key, range] : opt.ranges) {
        if (!spec->defaults.count(key)) continue;
        const auto& sup = spec->supported.at(key);
        if (range.lo > range.hi || range.lo < sup.lo || range.hi > sup.hi) {
            VerificationReport r;
            r.check = id;
            r.params = {{key, json::array({range.lo, range.hi})}};
            r.status = Status::skipped;
            r.note = "parameter " + key + " outside supported range [" + std::to_string(sup.lo) + ", " +
                     std::to_string(sup.hi) + "]";
            return {r};
        }
        ranges[key] = range;
    }
    return spec->run(ranges, opt.seed);
}

inline std::vector<VerificationReport> verify_all(const VerifyOptions& opt = {}) {
    std::vector<VerificationReport> out;
    for (const auto& c : verification_catalog()) {
        auto rs = verify(c.id, opt);
        out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
}

inline bool all_passed(const std::vector<VerificationReport>& rs) {
    return std::all_of(rs.begin(), rs.end(), [](const VerificationReport& r) { return r.status == Status::pass; });
}

// --------------------------------------------------------------- emission

inline json to_json(const VerificationReport& r) {
    json j;
    j["check"] = r.check;
    j["params"] = r.params;
    j["status"] = to_string(r.status);
    j["measured"] = r.measured;
    j["bound"] = r.bound;
    j["runtime"] = r.runtime;
    if (!r.counterexample.is_null()) j["counterexample"] = r.counterexample;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json to_json(const std::vector<VerificationReport>& rs) {
    json a = json::array();
    for (const auto& r : rs) a.push_back(to_json(r));
    return a;
}

inline VerificationReport report_from_json(const json& j) {
    VerificationReport r;
    r.check = detail::require(j, "check").get<std::string>();
    r.params = j.value("params", json::object());
    std::string s = detail::require(j, "status").get<std::string>();
    if (s == "pass") r.status = Status::pass;
    else if (s == "fail") r.status = Status::fail;
    else if (s == "skipped") r.status = Status::skipped;
    else throw std::invalid_argument("unknown status '" + s + "'");
    r.measured = j.value("measured", json::object());
    r.bound = j.value("bound", json::object());
    r.runtime = j.value("runtime", 0.0);
    if (j.contains("counterexample")) r.counterexample = j.at("counterexample");
    r.note = j.value("note", std::string());
    return r;
}

namespace detail {
inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}
}  // namespace detail

inline std::string reports_csv(const std::vector<VerificationReport>& rs) {
    std::ostringstream os;
    os << "check,params,status,measured,bound,runtime\n";
    for (const auto& r : rs)
        os << r.check << "," << detail::csv_quote(r.params.dump()) << "," << to_string(r.status) << ","
           << detail::csv_quote(r.measured.dump()) << "," << detail::csv_quote(r.bound.dump()) << ","
           << format_decimal(r.runtime) << "\n";
    return os.str();
}

}  // namespace scalebar

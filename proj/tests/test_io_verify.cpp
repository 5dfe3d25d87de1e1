#include <scalebar/scalebar.hpp>
#include <scalebar/verify.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace scalebar;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

VerifyOptions range(const std::string& key, int lo, int hi) {
    VerifyOptions o;
    o.ranges[key] = {lo, hi};
    return o;
}

}  // namespace

// --------------------------------------------------------------- round trips

TEST(RoundTrip, WeightSets) {
    for (const auto& ws : {gamma_3(5), gamma_qubit(7), gamma_stacked(3, 2), omega_poly(6, 3).omega_prime,
                           quiver_instance(3, 4).gamma}) {
        json j = to_json(ws);
        auto back = weightset_from_json(json::parse(j.dump()));
        EXPECT_EQ(back.label(), ws.label());
        ASSERT_EQ(back.size(), ws.size());
        for (std::size_t k = 0; k < ws.size(); ++k) EXPECT_EQ(back[k], ws[k]);
        EXPECT_EQ(to_json(back).dump(), j.dump());
    }
}

TEST(RoundTrip, ArraysAndTensors) {
    auto p = diameter_instance(3).p;
    auto back = array_from_json(json::parse(to_json(p).dump()));
    EXPECT_EQ(back.entries(), p.entries());
    auto k = kravtsov_lambda(9).lambda;
    EXPECT_EQ(array_from_json(to_json(k)).entries(), k.entries());

    std::mt19937_64 rng(0);
    std::normal_distribution<double> N(0.0, 1.0);
    ComplexTensor v(Dimensions(3, 3));
    for (const auto& t : frak_W(3)) v.set(t, {N(rng), N(rng)});
    auto vb = tensor_from_json(json::parse(to_json(v).dump()));
    ASSERT_EQ(vb.entries().size(), v.entries().size());
    for (const auto& [idx, val] : v.entries()) EXPECT_EQ(vb.get(idx), val);  // bit-exact
    auto rt = rounded_tensor(diameter_instance(2).p, 64).tensor;
    for (const auto& [idx, val] : rt.entries()) EXPECT_EQ(tensor_from_json(to_json(rt)).get(idx), val);
}

TEST(RoundTrip, RationalsAsStrings) {
    json j = to_json(kravtsov_lambda(4).lambda);
    EXPECT_EQ(j["entries"][0]["val"], "1/8");
    EXPECT_EQ(to_json(gamma_3(3))["elements"][0][0], "-1/3");
}

TEST(RoundTrip, FieldOrderStable) {
    json j = to_json(gamma_3(3));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"n", "d", "label", "elements"}));
}

TEST(Parsing, RejectsMalformedInput) {
    EXPECT_THROW(weightset_from_json(json::parse(R"({"n":2,"d":1,"elements":[["1/3","-1/3"]]})")), std::invalid_argument);
    EXPECT_THROW(weightset_from_json(json::parse(R"({"n":2,"d":1,"elements":[["1/2"]]})")), std::invalid_argument);
    EXPECT_THROW(array_from_json(json::parse(R"({"n":2,"d":2,"entries":[{"idx":[1,3],"val":"1"}]})")), std::out_of_range);
    EXPECT_THROW(array_from_json(json::parse(R"({"n":2,"d":2})")), std::invalid_argument);
    EXPECT_THROW(read_json_file("/nonexistent/path.json"), std::runtime_error);
    EXPECT_THROW(parse_matrix_csv("1,2\n3\n"), std::invalid_argument);
}

TEST(Csv, MatrixAndFormats) {
    auto M = parse_matrix_csv("# comment\n1, 2\n3,4.5\n");
    EXPECT_EQ(M.rows(), 2);
    EXPECT_DOUBLE_EQ(M(1, 1), 4.5);
    EXPECT_TRUE(parse_matrix_csv(matrix_csv(M)).isApprox(M));
    EXPECT_EQ(format_decimal(0.1), "0.10000000000000001");
    std::string ws = weightset_csv(gamma_3(3));
    EXPECT_EQ(ws.substr(0, ws.find('\n')), "x1,x2,x3,x4,x5,x6,x7,x8,x9");
    EXPECT_EQ(count_lines(ws), 7u);
}

TEST(Csv, ProbeHeader) {
    WeightSet ws(Dimensions(2, 1), "pair");
    ws.add(epsilon(2, 1));
    ws.add(epsilon(2, 2));
    GeometricProgram prog(ws, Eigen::Vector2d(0.25, 1.0));
    auto pr = diameter_probe(prog, 1e-6, {0.5, 1.0, 2.0, 4.0});
    std::string csv = probe_csv(pr);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "R,achieved,gap");
    EXPECT_EQ(count_lines(csv), 5u);
    json j = to_json(pr);
    EXPECT_TRUE(j["R_needed"].is_number());
}

TEST(Files, WriteReadRoundTrip) {
    auto path = std::filesystem::temp_directory_path() / "scalebar_io_test.json";
    write_file(path.string(), to_json(gamma_4(3)).dump(2));
    auto back = weightset_from_json(read_json_file(path.string()));
    EXPECT_EQ(back.size(), 6u);
    std::filesystem::remove(path);
    EXPECT_THROW(write_file("/nonexistent/dir/x.json", "x"), std::runtime_error);
}

// ------------------------------------------------------------------- verify

TEST(Verify, CatalogOrder) {
    std::vector<std::string> ids;
    for (const auto& c : verification_catalog()) ids.push_back(c.id);
    EXPECT_EQ(ids, (std::vector<std::string>{"margin-a", "margin-b", "margin-c", "kravtsov", "stacked-aff",
                                             "qubit-free", "wn-free", "quiver", "gamma4", "poly", "diameter-q",
                                             "diameter-kernel", "diameter-sv", "diameter-probe", "pad", "rounding",
                                             "free-moment", "gap-witness", "free-diameter"}));
}

TEST(Verify, MarginBExample) {
    auto rs = verify("margin-b", range("n", 3, 10));
    ASSERT_EQ(rs.size(), 8u);
    for (const auto& r : rs) {
        EXPECT_EQ(r.status, Status::pass);
        EXPECT_LE(r.measured["distance"].get<double>(), r.bound["distance"].get<double>());
        EXPECT_TRUE(r.counterexample.is_null());
    }
}

TEST(Verify, KravtsovExample) {
    auto rs = verify("kravtsov", range("n", 3, 20));
    ASSERT_EQ(rs.size(), 18u);
    for (const auto& r : rs) {
        EXPECT_EQ(r.status, Status::pass);
        EXPECT_EQ(r.measured["violations"], 0);
    }
}

TEST(Verify, UnknownIdListsCatalog) {
    try {
        verify("no-such-check");
        FAIL() << "expected an exception";
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("margin-a"), std::string::npos);
        EXPECT_NE(msg.find("free-diameter"), std::string::npos);
    }
}

TEST(Verify, OutOfRangeIsSkippedWithReason) {
    auto rs = verify("margin-b", range("n", 3, 40));
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0].status, Status::skipped);
    EXPECT_NE(rs[0].note.find("outside supported range"), std::string::npos);
    EXPECT_EQ(verify("margin-b", range("n", 5, 4))[0].status, Status::skipped);
}

TEST(Verify, SeedDeterministicAndIdempotent) {
    VerifyOptions o;
    o.seed = 0;
    auto a = verify("rounding", o), b = verify("rounding", o);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].measured.dump(), b[k].measured.dump());
        EXPECT_EQ(a[k].status, b[k].status);
    }
    o.seed = 1;
    auto c = verify("rounding", o);
    EXPECT_NE(a[0].measured.dump(), c[0].measured.dump());
    EXPECT_TRUE(all_passed(c));
}

TEST(Verify, FailureCarriesCounterexample) {
    VerificationReport r;
    r.check = "x";
    r.measured = {{"v", 1}};
    detail::finish(r, false, detail::Clock::now());
    EXPECT_EQ(r.status, Status::fail);
    EXPECT_EQ(r.counterexample, r.measured);
}

TEST(Verify, ReportEmission) {
    auto rs = verify("margin-a", range("d", 3, 6));
    std::string csv = reports_csv(rs);
    EXPECT_EQ(count_lines(csv), rs.size() + 1);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "check,params,status,measured,bound,runtime");
    json j = to_json(rs);
    ASSERT_EQ(j.size(), rs.size());
    for (std::size_t k = 0; k < rs.size(); ++k) {
        auto back = report_from_json(j[k]);
        EXPECT_EQ(to_json(back).dump(), j[k].dump());
    }
    std::vector<std::string> keys;
    for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"check", "params", "status", "measured", "bound", "runtime"}));
}

TEST(Verify, EveryFastCheckPasses) {
    for (const auto& id : {"margin-c", "stacked-aff", "qubit-free", "wn-free", "quiver", "gamma4", "poly", "diameter-q",
                           "diameter-kernel", "diameter-sv", "pad", "free-moment", "gap-witness", "free-diameter"}) {
        auto rs = verify(id);
        EXPECT_FALSE(rs.empty()) << id;
        for (const auto& r : rs) EXPECT_EQ(r.status, Status::pass) << id << " " << r.params.dump();
    }
}

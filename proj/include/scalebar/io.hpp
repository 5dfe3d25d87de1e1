#pragma once

// JSON and CSV serialization of weight sets, arrays, tensors, probe results
// and dense matrices.  Rationals are written as "p/q" strings; CSV decimals
// carry 17 significant digits.  Indices are 1-based in every format.

#include "capacity.hpp"
#include "weights.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace scalebar {

using json = nlohmann::ordered_json;

inline std::string format_decimal(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

namespace detail {
inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline Rational rational_from_json(const json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(BigInt(v.get<long long>()));
    if (v.is_number()) return from_double(v.get<double>());
    throw std::invalid_argument("expected a rational as \"p/q\" or a number");
}

inline IndexTuple index_from_json(const json& v, const Dimensions& dims) {
    IndexTuple t(v.get<std::vector<int>>());
    t.validate(dims);
    return t;
}

inline Dimensions dims_from_json(const json& j) {
    return Dimensions(require(j, "n").get<int>(), require(j, "d").get<int>());
}
}  // namespace detail

// ---------------------------------------------------------------- weight sets

inline json to_json(const WeightSet& ws) {
    json j;
    j["n"] = ws.dims().n;
    j["d"] = ws.dims().d;
    j["label"] = ws.label();
    json els = json::array();
    for (const auto& w : ws.elements()) {
        json row = json::array();
        for (const auto& c : w.coords()) row.push_back(to_pq(c));
        els.push_back(std::move(row));
    }
    j["elements"] = std::move(els);
    return j;
}

inline WeightSet weightset_from_json(const json& j) {
    Dimensions dims = detail::dims_from_json(j);
    WeightSet ws(dims, j.contains("label") ? j.at("label").get<std::string>() : std::string());
    for (const auto& row : detail::require(j, "elements")) {
        if (static_cast<int>(row.size()) != dims.length()) throw std::invalid_argument("weight of wrong length");
        std::vector<std::int64_t> s;
        for (const auto& c : row) {
            Rational x = detail::rational_from_json(c) * dims.n;
            if (denominator_of(x) != 1) throw std::invalid_argument("weight coordinate is not a multiple of 1/n");
            s.push_back(numerator_of(x).convert_to<std::int64_t>());
        }
        ws.add(WeightVector(dims, std::move(s)));
    }
    return ws;
}

// --------------------------------------------------------------------- arrays

inline json to_json(const SparseArray& a) {
    json j;
    j["n"] = a.dims().n;
    j["d"] = a.dims().d;
    json es = json::array();
    for (const auto& [idx, v] : a.entries()) {
        json e;
        e["idx"] = idx.indices;
        e["val"] = to_pq(v);
        es.push_back(std::move(e));
    }
    j["entries"] = std::move(es);
    return j;
}

inline SparseArray array_from_json(const json& j) {
    Dimensions dims = detail::dims_from_json(j);
    SparseArray a(dims);
    for (const auto& e : detail::require(j, "entries"))
        a.add(detail::index_from_json(detail::require(e, "idx"), dims), detail::rational_from_json(detail::require(e, "val")));
    return a;
}

// -------------------------------------------------------------------- tensors

inline json to_json(const ComplexTensor& v) {
    json j;
    j["n"] = v.dims().n;
    j["d"] = v.dims().d;
    json es = json::array();
    for (const auto& [idx, c] : v.entries()) {
        json e;
        e["idx"] = idx.indices;
        e["re"] = c.real();
        e["im"] = c.imag();
        es.push_back(std::move(e));
    }
    j["entries"] = std::move(es);
    return j;
}

inline ComplexTensor tensor_from_json(const json& j) {
    Dimensions dims = detail::dims_from_json(j);
    ComplexTensor v(dims);
    for (const auto& e : detail::require(j, "entries")) {
        double re = e.contains("re") ? e.at("re").get<double>() : 0.0;
        double im = e.contains("im") ? e.at("im").get<double>() : 0.0;
        v.set(detail::index_from_json(detail::require(e, "idx"), dims), {re, im});
    }
    return v;
}

// ------------------------------------------------------------------------ CSV

inline std::string weightset_csv(const WeightSet& ws) {
    std::ostringstream os;
    for (int k = 0; k < ws.dims().length(); ++k) os << (k ? "," : "") << "x" << (k + 1);
    os << "\n";
    for (const auto& w : ws.elements()) {
        auto v = w.to_doubles();
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << format_decimal(v[k]);
        os << "\n";
    }
    return os.str();
}

inline std::string array_csv(const SparseArray& a) {
    std::ostringstream os;
    for (int k = 0; k < a.dims().d; ++k) os << "i" << (k + 1) << ",";
    os << "val\n";
    for (const auto& [idx, v] : a.entries()) {
        for (int i : idx.indices) os << i << ",";
        os << format_decimal(to_double(v)) << "\n";
    }
    return os.str();
}

inline std::string tensor_csv(const ComplexTensor& t) {
    std::ostringstream os;
    for (int k = 0; k < t.dims().d; ++k) os << "i" << (k + 1) << ",";
    os << "re,im\n";
    for (const auto& [idx, c] : t.entries()) {
        for (int i : idx.indices) os << i << ",";
        os << format_decimal(c.real()) << "," << format_decimal(c.imag()) << "\n";
    }
    return os.str();
}

inline std::string probe_csv(const DiameterProbeResult& r) {
    std::ostringstream os;
    os << "R,achieved,gap\n";
    for (std::size_t k = 0; k < r.radii.size(); ++k)
        os << format_decimal(r.radii[k]) << "," << format_decimal(r.achieved[k]) << ","
           << format_decimal(r.achieved[k] - r.capacity) << "\n";
    return os.str();
}

inline json to_json(const DiameterProbeResult& r) {
    json j;
    j["eps"] = r.eps;
    j["capacity"] = r.capacity;
    j["R_needed"] = r.R_needed ? json(*r.R_needed) : json("not reached");
    j["radii"] = r.radii;
    j["achieved"] = r.achieved;
    return j;
}

// Comma-separated dense matrix, one row per line; blank lines and lines
// starting with '#' are skipped.
inline Eigen::MatrixXd parse_matrix_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            std::size_t used = 0;
            double x = std::stod(cell, &used);
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
            if (used != cell.size()) throw std::invalid_argument("bad matrix entry '" + cell + "'");
            row.push_back(x);
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw std::invalid_argument("ragged matrix CSV");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("empty matrix CSV");
    Eigen::MatrixXd M(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k) M(i, k) = rows[i][k];
    return M;
}

inline std::string matrix_csv(const Eigen::MatrixXd& M) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index k = 0; k < M.cols(); ++k) os << (k ? "," : "") << format_decimal(M(i, k));
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------- files

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

inline json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace scalebar

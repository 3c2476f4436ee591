#ifndef CZREACH_JSON_IO_HPP
#define CZREACH_JSON_IO_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "czreach/constrained_zonotope.hpp"
#include "czreach/errors.hpp"
#include "czreach/network.hpp"
#include "czreach/reach.hpp"
#include "czreach/verify.hpp"

namespace czreach {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Matrices and vectors
// ---------------------------------------------------------------------------

inline json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

/// Row-major nested arrays; a matrix with zero rows encodes as [].
inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array of numbers.");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError(where + ": expected a number.");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

/// cols < 0 lets the first row fix the width; zero rows give a 0 x max(cols,0)
/// matrix.
inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where,
                                        Eigen::Index cols = -1) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array of rows.");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd::Zero(0, cols < 0 ? 0 : cols);
    if (!j[0].is_array()) throw SchemaError(where + ": expected rows to be arrays.");
    Eigen::Index width = cols >= 0 ? cols : static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, width);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != width) {
            throw SchemaError(where + ": ragged rows.");
        }
        for (Eigen::Index k = 0; k < width; ++k) {
            const auto& cell = row[static_cast<std::size_t>(k)];
            if (!cell.is_number()) throw SchemaError(where + ": expected a number.");
            m(i, k) = cell.get<double>();
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Constrained zonotopes
// ---------------------------------------------------------------------------

inline json cz_to_json(const ConstrainedZonotope& Z) {
    return json{{"c", vector_to_json(Z.c)},
                {"G", matrix_to_json(Z.G)},
                {"A", matrix_to_json(Z.A)},
                {"b", vector_to_json(Z.b)}};
}

inline ConstrainedZonotope cz_from_json(const json& j, const std::string& where = "set") {
    if (!j.is_object()) throw SchemaError(where + ": expected an object.");
    for (const char* key : {"c", "G", "A", "b"}) {
        if (!j.contains(key)) throw SchemaError(where + ": missing field \"" + key + "\".");
    }
    Eigen::VectorXd c = vector_from_json(j["c"], where + ".c");
    Eigen::MatrixXd G = matrix_from_json(j["G"], where + ".G");
    if (G.rows() == 0 && c.size() > 0) G = Eigen::MatrixXd::Zero(c.size(), 0);
    Eigen::MatrixXd A = matrix_from_json(j["A"], where + ".A", G.cols());
    Eigen::VectorXd b = vector_from_json(j["b"], where + ".b");
    try {
        return {std::move(c), std::move(G), std::move(A), std::move(b)};
    } catch (const DimensionMismatch& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

inline json network_to_json(const FeedforwardNetwork& net) {
    json layers = json::array();
    for (const auto& layer : net.layers) {
        layers.push_back(json{{"W", matrix_to_json(layer.W)}, {"v", vector_to_json(layer.v)}});
    }
    return json{{"schema_version", kSchemaVersion}, {"layers", layers}};
}

inline FeedforwardNetwork network_from_json(const json& j) {
    if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array()) {
        throw SchemaError("network: expected an object with a \"layers\" array.");
    }
    FeedforwardNetwork net;
    std::size_t index = 0;
    for (const auto& lj : j["layers"]) {
        const std::string where = "network.layers[" + std::to_string(index++) + "]";
        if (!lj.is_object() || !lj.contains("W") || !lj.contains("v")) {
            throw SchemaError(where + ": expected an object with \"W\" and \"v\".");
        }
        Layer layer;
        layer.W = matrix_from_json(lj["W"], where + ".W");
        layer.v = vector_from_json(lj["v"], where + ".v");
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw SchemaError("network: needs at least one layer.");
    net.validate();
    return net;
}

inline json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

inline FeedforwardNetwork load_network(const std::filesystem::path& path) {
    return network_from_json(parse_json_file(path));
}

// ---------------------------------------------------------------------------
// Reach results and reports
// ---------------------------------------------------------------------------

inline json reach_result_to_json(const ReachResult& result) {
    json steps = json::array();
    for (std::size_t t = 0; t < result.steps.size(); ++t) {
        json sets = json::array();
        for (const auto& z : result.steps[t].members) sets.push_back(cz_to_json(z));
        steps.push_back(json{{"t", t}, {"sets", sets}});
    }
    json timings = json::array();
    for (double ms : result.timings_ms) timings.push_back(ms);
    json counts = json::array();
    for (std::size_t c : result.member_counts) counts.push_back(c);
    return json{{"schema_version", kSchemaVersion},
                {"method", result.method},
                {"controller", result.controller},
                {"exact_sets", result.exact_sets},
                {"steps", steps},
                {"member_counts", counts},
                {"timings_ms", timings}};
}

inline ReachResult reach_result_from_json(const json& j) {
    if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
        throw SchemaError("result: expected an object with a \"steps\" array.");
    }
    ReachResult result;
    result.method = j.value("method", std::string("exact"));
    result.controller = j.value("controller", std::string("exact"));
    result.exact_sets = j.value("exact_sets", false);
    for (const auto& sj : j["steps"]) {
        const std::string where = "result.steps[" + std::to_string(result.steps.size()) + "]";
        if (!sj.is_object() || !sj.contains("sets") || !sj["sets"].is_array()) {
            throw SchemaError(where + ": expected an object with a \"sets\" array.");
        }
        SetUnion u;
        std::size_t k = 0;
        for (const auto& zj : sj["sets"]) {
            u.members.push_back(cz_from_json(zj, where + ".sets[" + std::to_string(k++) + "]"));
        }
        result.steps.push_back(std::move(u));
        result.member_counts.push_back(result.steps.back().size());
        result.timings_ms.push_back(0.0);
    }
    if (j.contains("timings_ms") && j["timings_ms"].is_array() &&
        j["timings_ms"].size() == result.steps.size()) {
        for (std::size_t t = 0; t < result.steps.size(); ++t) {
            result.timings_ms[t] = j["timings_ms"][t].get<double>();
        }
    }
    if (result.steps.empty()) throw SchemaError("result: no steps.");
    return result;
}

inline json report_to_json(const VerificationReport& report) {
    json witnesses = json::array();
    for (const auto& w : report.witnesses) {
        witnesses.push_back(json{
            {"t", w.t}, {"member", w.member}, {"obstacle", w.obstacle}, {"lp_value", w.lp_value}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"verdict", to_string(report.verdict)},
                {"witnesses", witnesses},
                {"lp_count", report.lp_count},
                {"lp_solved", report.lp_solved},
                {"wall_ms", report.wall_ms}};
}

// ---------------------------------------------------------------------------
// Atomic file output
// ---------------------------------------------------------------------------

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline void write_json_atomic(const std::filesystem::path& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

} // namespace czreach

#endif

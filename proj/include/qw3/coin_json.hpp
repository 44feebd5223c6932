#pragma once

// Coin files: {"matrix": [[[re, im] x3] x3]} or
// {"class": "c1" | "c2" | "general", "params": {name: radians}}.
// A file may carry both; the matrix must then agree with the parameters.

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "qw3/coins.hpp"
#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"

namespace qw3 {

using json = nlohmann::json;

struct CoinSpec {
    UnitaryCoin coin;
    std::optional<FamilyParams> family; ///< set for "c1" / "c2" sources
    std::optional<CoinParams> general;  ///< set for "general" sources
};

namespace detail {

using ParamTable = std::map<std::string, double>;

inline ParamTable read_params(const json& j, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw MalformedInput("\"params\" must be an object");
    ParamTable t;
    for (const char* k : allowed) t[k] = 0.0;
    for (const auto& [key, val] : j.items()) {
        if (!t.contains(key)) throw MalformedInput("unknown parameter \"" + key + "\"");
        if (!val.is_number()) throw MalformedInput("parameter \"" + key + "\" must be a number");
        t[key] = val.get<double>();
    }
    return t;
}

inline Mat3C read_matrix(const json& j) {
    if (!j.is_array() || j.size() != 3) throw MalformedInput("\"matrix\" must have three rows");
    Mat3C m;
    for (int r = 0; r < 3; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != 3) throw MalformedInput("each matrix row must have three entries");
        for (int c = 0; c < 3; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw MalformedInput("matrix entries must be [re, im] pairs");
            }
        }
    }
    return m;
}

} // namespace detail

inline C1Params c1_params_from(const detail::ParamTable& t) {
    return {t.at("gamma2"), t.at("gamma4"), t.at("gamma5"), t.at("theta13"), t.at("theta23")};
}

inline C2Params c2_params_from(const detail::ParamTable& t) {
    return {t.at("gamma1"), t.at("gamma2"), t.at("gamma4"), t.at("gamma5"), t.at("delta"), t.at("theta23")};
}

inline CoinParams general_params_from(const detail::ParamTable& t) {
    return {t.at("theta12"), t.at("theta13"), t.at("theta23"), t.at("delta"), t.at("gamma1"),
            t.at("gamma2"),  t.at("gamma3"),  t.at("gamma4"),  t.at("gamma5")};
}

inline constexpr double kCoinFileTol = 1e-10;

inline CoinSpec coin_from_json(const json& j, double tol = kCoinFileTol) {
    if (!j.is_object()) throw MalformedInput("coin file must be a JSON object");
    std::optional<Mat3C> matrix;
    if (j.contains("matrix")) matrix = detail::read_matrix(j["matrix"]);

    std::optional<CoinSpec> from_params;
    if (j.contains("class")) {
        if (!j["class"].is_string()) throw MalformedInput("\"class\" must be a string");
        const std::string cls = j["class"].get<std::string>();
        const json params = j.contains("params") ? j["params"] : json::object();
        CoinSpec s;
        if (cls == "c1") {
            const C1Params p = c1_params_from(detail::read_params(params, {"gamma2", "gamma4", "gamma5", "theta13", "theta23"}));
            s.coin = build_c1(p);
            s.family = p;
        } else if (cls == "c2") {
            const C2Params p = c2_params_from(
                detail::read_params(params, {"gamma1", "gamma2", "gamma4", "gamma5", "delta", "theta23"}));
            s.coin = build_c2(p);
            s.family = p;
        } else if (cls == "general") {
            const CoinParams p = general_params_from(detail::read_params(
                params, {"theta12", "theta13", "theta23", "delta", "gamma1", "gamma2", "gamma3", "gamma4", "gamma5"}));
            s.coin = build_unitary(p);
            s.general = p;
        } else {
            throw MalformedInput("\"class\" must be one of c1, c2, general");
        }
        from_params = s;
    }

    if (from_params) {
        if (matrix && max_abs_diff(*matrix, from_params->coin.matrix()) > tol)
            throw MalformedInput("\"matrix\" disagrees with the coin built from \"params\"");
        return *from_params;
    }
    if (!matrix) throw MalformedInput("coin file needs \"matrix\" or \"class\"");
    return CoinSpec{UnitaryCoin::from_matrix(*matrix, tol), std::nullopt, std::nullopt};
}

inline json matrix_to_json(const Mat3C& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
        json row = json::array();
        for (int c = 0; c < 3; ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

inline json params_to_json(const C1Params& p) {
    return {{"gamma2", p.gamma2}, {"gamma4", p.gamma4}, {"gamma5", p.gamma5}, {"theta13", p.theta13}, {"theta23", p.theta23}};
}

inline json params_to_json(const C2Params& p) {
    return {{"gamma1", p.gamma1}, {"gamma2", p.gamma2}, {"gamma4", p.gamma4},
            {"gamma5", p.gamma5}, {"delta", p.delta},   {"theta23", p.theta23}};
}

inline json params_to_json(const CoinParams& p) {
    return {{"theta12", p.theta12}, {"theta13", p.theta13}, {"theta23", p.theta23},
            {"delta", p.delta},     {"gamma1", p.gamma1},   {"gamma2", p.gamma2},
            {"gamma3", p.gamma3},   {"gamma4", p.gamma4},   {"gamma5", p.gamma5}};
}

inline json coin_to_json(const CoinSpec& s) {
    json j = json::object();
    if (s.family) {
        std::visit(
            [&](const auto& p) {
                j["class"] = std::is_same_v<std::decay_t<decltype(p)>, C1Params> ? "c1" : "c2";
                j["params"] = params_to_json(p);
            },
            *s.family);
    } else if (s.general) {
        j["class"] = "general";
        j["params"] = params_to_json(*s.general);
    }
    j["matrix"] = matrix_to_json(s.coin.matrix());
    return j;
}

} // namespace qw3

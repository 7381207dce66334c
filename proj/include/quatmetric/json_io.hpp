#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "errors.hpp"
#include "metric.hpp"
#include "qmatrix.hpp"
#include "quaternion.hpp"

namespace quatmetric {

using json = nlohmann::json;

// Quaternion: [w, x, y, z]. Complex: [re, im]. QMatrix:
// {"rows": n, "cols": m, "entries": [[[w,x,y,z], ...], ...]} row-major.

inline json to_json(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }
inline json to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

inline json to_json(const QMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

namespace detail {

inline double finite_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigInvalid(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigInvalid(where + ": non-finite number");
    return v;
}

}  // namespace detail

inline Quaternion quaternion_from_json(const json& j, const std::string& where = "quaternion") {
    if (j.is_number()) return Quaternion{detail::finite_number(j, where)};
    if (!j.is_array() || j.size() != 4) throw ConfigInvalid(where + ": expected [w, x, y, z]");
    return {detail::finite_number(j[0], where + "[0]"), detail::finite_number(j[1], where + "[1]"),
            detail::finite_number(j[2], where + "[2]"), detail::finite_number(j[3], where + "[3]")};
}

inline Complex complex_from_json(const json& j, const std::string& where = "complex") {
    if (j.is_number()) return {detail::finite_number(j, where), 0.0};
    if (!j.is_array() || j.size() != 2) throw ConfigInvalid(where + ": expected [re, im]");
    return {detail::finite_number(j[0], where + "[0]"), detail::finite_number(j[1], where + "[1]")};
}

inline QMatrix qmatrix_from_json(const json& j, const std::string& where = "matrix") {
    if (!j.is_object()) throw ConfigInvalid(where + ": expected an object with rows, cols, entries");
    for (const char* key : {"rows", "cols", "entries"})
        if (!j.contains(key)) throw ConfigInvalid(where + ": missing \"" + key + "\"");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer() || j["rows"].get<long long>() < 0 ||
        j["cols"].get<long long>() < 0)
        throw ConfigInvalid(where + ": rows and cols must be positive integers");
    const auto rows = j["rows"].get<std::size_t>();
    const auto cols = j["cols"].get<std::size_t>();
    if (rows == 0 || cols == 0) throw ConfigInvalid(where + ": rows and cols must be positive");
    const json& e = j["entries"];
    if (!e.is_array() || e.size() != rows) throw ConfigInvalid(where + ".entries: expected " + std::to_string(rows) + " rows");
    QMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rw = where + ".entries[" + std::to_string(r) + "]";
        if (!e[r].is_array() || e[r].size() != cols) throw ConfigInvalid(rw + ": expected " + std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = quaternion_from_json(e[r][c], rw + "[" + std::to_string(c) + "]");
    }
    return m;
}

/// A matrix family: a single matrix object, an array of them, or
/// {"matrices": [...], "field": "quaternion" | "complex"}.
struct MatrixFamily {
    std::vector<QMatrix> matrices;
    Field field = Field::Quaternion;
    std::size_t dim = 0;
};

inline MatrixFamily matrix_family_from_json(const json& j) {
    MatrixFamily fam;
    const json* list = &j;
    if (j.is_object() && j.contains("matrices")) {
        list = &j["matrices"];
        if (j.contains("field")) {
            const auto f = j["field"].get<std::string>();
            if (f == "complex") fam.field = Field::Complex;
            else if (f != "quaternion") throw ConfigInvalid("field: expected \"quaternion\" or \"complex\"");
        }
        if (j.contains("dim")) fam.dim = j["dim"].get<std::size_t>();
    }
    if (list->is_object()) {
        fam.matrices.push_back(qmatrix_from_json(*list));
    } else if (list->is_array()) {
        for (std::size_t k = 0; k < list->size(); ++k)
            fam.matrices.push_back(qmatrix_from_json((*list)[k], "matrices[" + std::to_string(k) + "]"));
    } else {
        throw ConfigInvalid("expected a matrix, a list of matrices, or {\"matrices\": [...]}");
    }
    if (!fam.matrices.empty()) {
        const std::size_t n = fam.matrices.front().rows();
        if (fam.dim != 0 && fam.dim != n) throw ConfigInvalid("dim does not match the matrices");
        fam.dim = n;
        for (std::size_t k = 0; k < fam.matrices.size(); ++k)
            if (!fam.matrices[k].square() || fam.matrices[k].rows() != n)
                throw ConfigInvalid("matrices[" + std::to_string(k) + "]: family members must be square of equal size");
    } else if (fam.dim == 0) {
        throw ConfigInvalid("empty family needs an explicit \"dim\"");
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Model configuration
//
// {
//   "omega":  1.0 | [{"t_start":0, "t_end":5, "value":1.0}
//                    | {"t_start":5, "t_end":10, "start":1.0, "end":2.0}, ...],
//   "rabi":   [re, im] | [segments with complex values],
//   "metric": {"a": 1.0, "z": [re, im]},
//   "t_grid": [0, 0.1, ...] | {"t_max": 10, "steps": 1000}
// }
// A bare value means constant over [0, t_max].

namespace detail {

inline Profile profile_from_json(const json& j, const std::string& name, double t_max, bool real_valued) {
    auto value = [&](const json& v, const std::string& where) {
        return real_valued ? Complex{finite_number(v, where), 0.0} : complex_from_json(v, where);
    };
    const bool bare = real_valued ? j.is_number() : (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()));
    if (bare) return Profile::constant(value(j, name), t_max);
    if (!j.is_array()) throw ConfigInvalid(name + ": expected a value or a list of segments");
    Profile p;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string where = name + "[" + std::to_string(k) + "]";
        const json& s = j[k];
        if (!s.is_object() || !s.contains("t_start") || !s.contains("t_end"))
            throw ConfigInvalid(where + ": segment needs t_start and t_end");
        ProfileSegment seg;
        seg.t_start = finite_number(s["t_start"], where + ".t_start");
        seg.t_end = finite_number(s["t_end"], where + ".t_end");
        if (s.contains("value")) {
            seg.start = seg.end = value(s["value"], where + ".value");
        } else if (s.contains("start") && s.contains("end")) {
            seg.start = value(s["start"], where + ".start");
            seg.end = value(s["end"], where + ".end");
            seg.chirp = true;
        } else {
            throw ConfigInvalid(where + ": segment needs \"value\" or \"start\"/\"end\"");
        }
        p.segments.push_back(seg);
    }
    return p;
}

}  // namespace detail

inline ModelConfig model_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigInvalid("config: expected an object");
    for (const char* key : {"omega", "rabi", "t_grid"})
        if (!j.contains(key)) throw ConfigInvalid(std::string("config: missing \"") + key + "\"");
    ModelConfig cfg;
    const json& g = j["t_grid"];
    if (g.is_array()) {
        for (std::size_t k = 0; k < g.size(); ++k) cfg.t_grid.push_back(detail::finite_number(g[k], "t_grid[" + std::to_string(k) + "]"));
    } else if (g.is_object() && g.contains("t_max") && g.contains("steps")) {
        const double t_max = detail::finite_number(g["t_max"], "t_grid.t_max");
        if (!g["steps"].is_number_integer() || g["steps"].get<long long>() < 0) throw ConfigInvalid("t_grid.steps: expected a nonnegative integer");
        if (t_max < 0) throw ConfigInvalid("t_grid.t_max: must be nonnegative");
        const auto steps = g["steps"].get<std::size_t>();
        if (steps == 0 && t_max != 0) throw ConfigInvalid("t_grid.steps: must be positive when t_max > 0");
        cfg.t_grid = uniform_grid(t_max, steps);
    } else {
        throw ConfigInvalid("t_grid: expected a list of times or {\"t_max\", \"steps\"}");
    }
    if (cfg.t_grid.empty()) throw ConfigInvalid("t_grid: empty");
    const double t_max = cfg.t_grid.back();
    cfg.omega = detail::profile_from_json(j["omega"], "omega", t_max, true);
    cfg.rabi = detail::profile_from_json(j["rabi"], "rabi", t_max, false);
    if (j.contains("metric")) {
        const json& m = j["metric"];
        if (!m.is_object()) throw ConfigInvalid("metric: expected {\"a\", \"z\"}");
        if (m.contains("a")) cfg.metric_a = detail::finite_number(m["a"], "metric.a");
        if (m.contains("z")) cfg.metric_z = complex_from_json(m["z"], "metric.z");
    }
    validate(cfg);
    return cfg;
}

}  // namespace quatmetric

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "frenetk/curve.hpp"
#include "frenetk/planner.hpp"
#include "frenetk/polyline.hpp"

namespace frenetk::io {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field(std::move(field)) {}
    std::string field;
};

enum class RunMode { baseline, repaired, both };

inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::baseline: return "baseline";
        case RunMode::repaired: return "repaired";
        case RunMode::both: return "both";
    }
    return "?";
}

inline RunMode parse_mode(const std::string& text, const std::string& field = "mode") {
    if (text == "baseline") return RunMode::baseline;
    if (text == "repaired") return RunMode::repaired;
    if (text == "both") return RunMode::both;
    throw ConfigError(field, "unknown mode '" + text + "' (expected baseline, repaired or both)");
}

struct EmitFlags {
    bool trace_csv = true;
    bool trace_json = true;
    bool svg_frames = false;
};

struct RunConfig {
    Scenario scenario;
    RunMode mode = RunMode::repaired;
    std::filesystem::path output_dir = "out";
    EmitFlags emit;
};

namespace detail {

inline std::string child(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

inline std::string index(const std::string& parent, std::size_t i) { return parent + "[" + std::to_string(i) + "]"; }

inline double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
    return v;
}

inline double positive(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (!(v > 0.0)) throw ConfigError(field, "must be positive");
    return v;
}

inline double non_negative(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (v < 0.0) throw ConfigError(field, "must not be negative");
    return v;
}

inline int positive_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    const auto v = j.get<long long>();
    if (v < 1 || v > 1'000'000) throw ConfigError(field, "must be between 1 and 1000000");
    return static_cast<int>(v);
}

inline Vec2 point(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(field, "expected [x, y]");
    return {number(j[0], index(field, 0)), number(j[1], index(field, 1))};
}

inline const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline void require_object(const json& j, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
}

inline double degrees(double deg) { return deg * std::numbers::pi / 180.0; }

inline CurvePiece parse_piece(const json& j, const std::string& field) {
    require_object(j, field);
    const json* kind = find(j, "kind");
    if (kind == nullptr || !kind->is_string()) throw ConfigError(child(field, "kind"), "expected line, arc or spline");
    const auto k = kind->get<std::string>();
    try {
        if (k == "line") {
            const json* from = find(j, "from");
            const json* to = find(j, "to");
            if (from == nullptr) throw ConfigError(child(field, "from"), "missing");
            if (to == nullptr) throw ConfigError(child(field, "to"), "missing");
            const Vec2 a = point(*from, child(field, "from"));
            const Vec2 b = point(*to, child(field, "to"));
            if (a == b) throw ConfigError(child(field, "to"), "line endpoints coincide");
            return LinePiece(a, b);
        }
        if (k == "arc") {
            for (const char* key : {"center", "radius", "start_angle_deg", "sweep_deg"}) {
                if (find(j, key) == nullptr) throw ConfigError(child(field, key), "missing");
            }
            const Vec2 c = point(j["center"], child(field, "center"));
            const double r = positive(j["radius"], child(field, "radius"));
            const double a0 = number(j["start_angle_deg"], child(field, "start_angle_deg"));
            const double sweep = number(j["sweep_deg"], child(field, "sweep_deg"));
            if (sweep == 0.0 || std::abs(sweep) >= 360.0) {
                throw ConfigError(child(field, "sweep_deg"), "must be nonzero and below 360 in magnitude");
            }
            return ArcPiece(c, r, degrees(a0), degrees(sweep));
        }
        if (k == "spline") {
            const json* wps = find(j, "waypoints");
            if (wps == nullptr || !wps->is_array()) throw ConfigError(child(field, "waypoints"), "expected an array");
            std::vector<Vec2> pts;
            for (std::size_t i = 0; i < wps->size(); ++i) pts.push_back(point((*wps)[i], index(child(field, "waypoints"), i)));
            return SplinePiece(std::move(pts));
        }
    } catch (const CurveError& e) {
        throw ConfigError(field, e.what());
    } catch (const GeometryError& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(child(field, "kind"), "unknown curve kind '" + k + "'");
}

inline ReferenceCurve parse_reference(const json& j, const std::string& field) {
    require_object(j, field);
    std::vector<CurvePiece> pieces;
    const json* kind = find(j, "kind");
    if (kind != nullptr && kind->is_string() && kind->get<std::string>() == "composite") {
        const json* list = find(j, "pieces");
        if (list == nullptr || !list->is_array() || list->empty()) {
            throw ConfigError(child(field, "pieces"), "expected a non-empty array");
        }
        for (std::size_t i = 0; i < list->size(); ++i) pieces.push_back(parse_piece((*list)[i], index(child(field, "pieces"), i)));
    } else {
        pieces.push_back(parse_piece(j, field));
    }
    try {
        return ReferenceCurve(std::move(pieces));
    } catch (const CurveError& e) {
        throw ConfigError(field, e.what());
    }
}

inline void apply_planner(const json& j, PlannerParams& p, const std::string& field) {
    require_object(j, field);
    if (const json* v = find(j, "num_candidates")) p.num_candidates = positive_int(*v, child(field, "num_candidates"));
    if (const json* v = find(j, "horizon_stations")) {
        p.horizon_stations = positive_int(*v, child(field, "horizon_stations"));
        if (p.horizon_stations < 2) throw ConfigError(child(field, "horizon_stations"), "must be at least 2");
    }
    if (const json* v = find(j, "replan_stride")) p.replan_stride = positive_int(*v, child(field, "replan_stride"));
    if (const json* v = find(j, "max_ticks")) p.max_ticks = positive_int(*v, child(field, "max_ticks"));
    if (const json* w = find(j, "weights")) {
        const std::string wf = child(field, "weights");
        require_object(*w, wf);
        if (const json* v = find(*w, "smoothness")) p.weights.smoothness = non_negative(*v, child(wf, "smoothness"));
        if (const json* v = find(*w, "centerline")) p.weights.centerline = non_negative(*v, child(wf, "centerline"));
        if (const json* v = find(*w, "bounds")) p.weights.bounds = non_negative(*v, child(wf, "bounds"));
    }
}

inline std::uint64_t parse_seed(const json& j, const std::string& field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
        throw ConfigError(field, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

}  // namespace detail

/// Builds a RunConfig from a parsed document. Unknown top-level keys are
/// rejected so typos surface as errors.
inline RunConfig config_from_json(const json& doc) {
    using namespace detail;
    require_object(doc, "");
    static const std::vector<std::string> known{"scenario", "name",   "reference", "spacing", "corridor",
                                                "obstacle", "agent",  "goal_station", "planner", "mode",
                                                "output",   "seed"};
    for (const auto& [key, _] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError(key, "unknown field");
    }

    RunConfig cfg{.scenario = scenarios::straight(), .mode = RunMode::repaired, .output_dir = "out", .emit = {}};
    if (const json* base = find(doc, "scenario")) {
        if (!base->is_string()) throw ConfigError("scenario", "expected a bundled scenario name");
        auto named = scenarios::by_name(base->get<std::string>());
        if (!named) throw ConfigError("scenario", "unknown bundled scenario '" + base->get<std::string>() + "'");
        cfg.scenario = std::move(*named);
    } else if (find(doc, "reference") == nullptr) {
        throw ConfigError("scenario", "either a bundled scenario or a reference curve is required");
    }
    Scenario& sc = cfg.scenario;

    if (const json* v = find(doc, "name")) {
        if (!v->is_string()) throw ConfigError("name", "expected a string");
        sc.name = v->get<std::string>();
    }
    if (const json* v = find(doc, "reference")) {
        sc.reference = parse_reference(*v, "reference");
        if (find(doc, "scenario") == nullptr) {
            sc.obstacle.reset();
            sc.agent_start = sc.reference.position(0.0);
            const Vec2 t = sc.reference.tangent(0.0);
            sc.agent_heading = std::atan2(t.y, t.x);
            sc.goal_station = -1.0;
        }
    }
    if (const json* v = find(doc, "spacing")) sc.spacing = positive(*v, "spacing");
    if (const json* c = find(doc, "corridor")) {
        require_object(*c, "corridor");
        if (const json* v = find(*c, "lane_half_width")) sc.lane_half_width = positive(*v, "corridor.lane_half_width");
        if (const json* v = find(*c, "inner_half_width_on_curve")) {
            if (v->is_null()) sc.inner_half_width_on_curve.reset();
            else sc.inner_half_width_on_curve = positive(*v, "corridor.inner_half_width_on_curve");
        }
        if (const json* v = find(*c, "clearance")) sc.clearance = non_negative(*v, "corridor.clearance");
    }
    if (const json* o = find(doc, "obstacle")) {
        if (o->is_null()) {
            sc.obstacle.reset();
        } else {
            require_object(*o, "obstacle");
            const json* center = find(*o, "center");
            const json* radius = find(*o, "radius");
            if (center == nullptr) throw ConfigError("obstacle.center", "missing");
            if (radius == nullptr) throw ConfigError("obstacle.radius", "missing");
            sc.obstacle = Obstacle{point(*center, "obstacle.center"), positive(*radius, "obstacle.radius")};
        }
    }
    if (const json* a = find(doc, "agent")) {
        require_object(*a, "agent");
        if (const json* v = find(*a, "start")) sc.agent_start = point(*v, "agent.start");
        if (const json* v = find(*a, "heading_deg")) sc.agent_heading = degrees(number(*v, "agent.heading_deg"));
    }
    if (const json* v = find(doc, "goal_station")) sc.goal_station = non_negative(*v, "goal_station");
    if (const json* p = find(doc, "planner")) apply_planner(*p, sc.planner, "planner");
    if (const json* v = find(doc, "seed")) sc.planner.base_seed = parse_seed(*v, "seed");
    if (const json* v = find(doc, "mode")) {
        if (!v->is_string()) throw ConfigError("mode", "expected a string");
        cfg.mode = parse_mode(v->get<std::string>());
    }
    if (const json* o = find(doc, "output")) {
        require_object(*o, "output");
        if (const json* v = find(*o, "dir")) {
            if (!v->is_string()) throw ConfigError("output.dir", "expected a string");
            cfg.output_dir = v->get<std::string>();
        }
        for (auto [key, flag] : {std::pair{"trace_csv", &cfg.emit.trace_csv}, std::pair{"trace_json", &cfg.emit.trace_json},
                                 std::pair{"svg_frames", &cfg.emit.svg_frames}}) {
            if (const json* v = find(*o, key)) {
                if (!v->is_boolean()) throw ConfigError(child("output", key), "expected true or false");
                *flag = v->get<bool>();
            }
        }
    }

    // Surface sampling violations at load time.
    try {
        const PolylineRef poly = sample_polyline(sc.reference, sc.spacing);
        build_corridor(sc, poly);
        if (sc.goal_station > poly.total_length()) throw ConfigError("goal_station", "beyond the end of the reference");
    } catch (const SamplingError& e) {
        throw ConfigError("spacing", e.what());
    } catch (const InfeasibleCorridor& e) {
        throw ConfigError("obstacle", e.what());
    }
    return cfg;
}

/// Loads a JSON config file. A bare bundled scenario name is accepted in
/// place of a path when no such file exists.
inline RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        if (scenarios::by_name(path.string())) return config_from_json(json{{"scenario", path.string()}});
        throw ConfigError("", "cannot open config file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "invalid JSON in '" + path.string() + "': " + e.what());
    }
    return config_from_json(doc);
}

}  // namespace frenetk::io

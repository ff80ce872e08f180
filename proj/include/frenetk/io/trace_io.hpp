#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "frenetk/planner.hpp"

namespace frenetk::io {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return v;
}

inline const char* mode_name(const PlanTrace& t) { return t.use_repair ? "repaired" : "baseline"; }

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{
        "mode",     "tick",      "row",     "seed",    "cost",    "points",  "monotone",      "self_intersection",
        "reversal", "discontinuity", "max_kappa_d", "agent_x", "agent_y", "agent_heading", "agent_s", "agent_d",
        "window_start", "s", "d", "x", "y"};
    return cols;
}

namespace detail {

inline std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ';';
        out += format_number(xs[i]);
    }
    return out;
}

inline void csv_row(std::ostream& os, const PlanTrace& trace, const TickRecord& rec, const char* kind,
                    const CandidateSummary& c, const std::string& tail) {
    const auto& a = rec.agent;
    const auto& f = rec.plan.agent_frenet;
    os << mode_name(trace) << ',' << rec.tick << ',' << kind << ',' << c.seed << ',' << format_number(c.cost) << ','
       << c.points << ',' << int(c.monotone) << ',' << int(c.self_intersection) << ',' << int(c.reversal) << ','
       << int(c.discontinuity) << ',' << format_number(c.max_kappa_d) << ',' << format_number(a.position.x) << ','
       << format_number(a.position.y) << ',' << format_number(a.heading) << ',' << format_number(f.s) << ','
       << format_number(f.d) << ',' << rec.plan.window_start << ',' << tail << '\n';
}

}  // namespace detail

inline void write_csv_header(std::ostream& os) {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
}

/// One "candidate" row per (tick, candidate), then one "selected" row per
/// tick whose s, d, x, y columns hold ';'-separated point lists.
inline void write_csv_rows(std::ostream& os, const PlanTrace& trace) {
    for (const auto& rec : trace.ticks) {
        for (const auto& c : rec.plan.candidates) detail::csv_row(os, trace, rec, "candidate", c, ",,,");
        std::vector<double> s, d, x, y;
        for (const auto& p : rec.plan.selected.points) {
            s.push_back(p.s);
            d.push_back(p.d);
        }
        for (const auto& p : rec.plan.selected_path) {
            x.push_back(p.x);
            y.push_back(p.y);
        }
        detail::csv_row(os, trace, rec, "selected", rec.plan.selected_summary,
                        detail::join_numbers(s) + ',' + detail::join_numbers(d) + ',' + detail::join_numbers(x) + ',' +
                            detail::join_numbers(y));
    }
}

inline nlohmann::json number_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json summary_json(const CandidateSummary& c) {
    return {{"seed", c.seed},
            {"cost", number_json(c.cost)},
            {"points", c.points},
            {"monotone", c.monotone},
            {"self_intersection", c.self_intersection},
            {"reversal", c.reversal},
            {"discontinuity", c.discontinuity},
            {"max_kappa_d", number_json(c.max_kappa_d)}};
}

inline nlohmann::json tick_json(const PlanTrace& trace, const TickRecord& rec) {
    using nlohmann::json;
    json selected = summary_json(rec.plan.selected_summary);
    json pts = json::array();
    for (std::size_t i = 0; i < rec.plan.selected.points.size(); ++i) {
        const auto& f = rec.plan.selected.points[i];
        const auto& c = rec.plan.selected_path[i];
        pts.push_back({{"s", f.s}, {"d", f.d}, {"x", c.x}, {"y", c.y}});
    }
    selected["trajectory"] = std::move(pts);
    json candidates = json::array();
    for (const auto& c : rec.plan.candidates) candidates.push_back(summary_json(c));
    const auto& dg = rec.plan.diagnostics;
    return {{"mode", mode_name(trace)},
            {"tick", rec.tick},
            {"agent",
             {{"x", rec.agent.position.x},
              {"y", rec.agent.position.y},
              {"heading", rec.agent.heading},
              {"s", rec.plan.agent_frenet.s},
              {"d", rec.plan.agent_frenet.d}}},
            {"window_start", rec.plan.window_start},
            {"selected", std::move(selected)},
            {"candidates", std::move(candidates)},
            {"diagnostics",
             {{"reversals", dg.reversals},
              {"self_intersections", dg.self_intersections},
              {"non_monotone", dg.non_monotone},
              {"anomalous", dg.anomalous},
              {"infeasible", dg.infeasible}}}};
}

inline nlohmann::json traces_json(const std::vector<const PlanTrace*>& traces) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto* t : traces) {
        for (const auto& rec : t->ticks) out.push_back(tick_json(*t, rec));
    }
    return out;
}

struct ModeSummary {
    std::string mode;
    bool goal_reached = false;
    std::size_t ticks = 0;
    std::size_t anomalous_selected = 0;
    std::size_t anomalous_candidates = 0;
    std::size_t candidate_reversals = 0;
    std::size_t candidate_self_intersections = 0;
    std::optional<int> failed_tick;
    std::string failure;
    double runtime_ms = 0.0;
};

inline ModeSummary summarize(const PlanTrace& t, double runtime_ms) {
    ModeSummary m;
    m.mode = mode_name(t);
    m.goal_reached = t.goal_reached;
    m.ticks = t.ticks.size();
    m.anomalous_selected = t.anomalous_selected();
    for (const auto& rec : t.ticks) {
        m.anomalous_candidates += rec.plan.diagnostics.anomalous;
        m.candidate_reversals += rec.plan.diagnostics.reversals;
        m.candidate_self_intersections += rec.plan.diagnostics.self_intersections;
    }
    m.failed_tick = t.failed_tick;
    m.failure = t.failure;
    m.runtime_ms = runtime_ms;
    return m;
}

inline nlohmann::json summary_document(const std::string& scenario, std::uint64_t seed,
                                       const std::vector<ModeSummary>& modes) {
    using nlohmann::json;
    json list = json::array();
    json comparison = json::object();
    for (const auto& m : modes) {
        list.push_back({{"mode", m.mode},
                        {"goal_reached", m.goal_reached},
                        {"ticks", m.ticks},
                        {"anomalous_selected", m.anomalous_selected},
                        {"anomalous_candidates", m.anomalous_candidates},
                        {"candidate_reversals", m.candidate_reversals},
                        {"candidate_self_intersections", m.candidate_self_intersections},
                        {"failed_tick", m.failed_tick ? json(*m.failed_tick) : json(nullptr)},
                        {"failure", m.failure},
                        {"runtime_ms", m.runtime_ms}});
        comparison[m.mode] = m.anomalous_selected;
    }
    return {{"scenario", scenario}, {"seed", seed}, {"modes", std::move(list)},
            {"anomalous_selected_by_mode", std::move(comparison)}};
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw OutputError("cannot write '" + path.string() + "'");
    return os;
}

inline void finish_output(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw OutputError("write failed for '" + path.string() + "'");
}

inline void write_csv_file(const std::filesystem::path& path, const std::vector<const PlanTrace*>& traces) {
    auto os = open_output(path);
    write_csv_header(os);
    for (const auto* t : traces) write_csv_rows(os, *t);
    finish_output(os, path);
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto os = open_output(path);
    os << doc.dump(2) << '\n';
    finish_output(os, path);
}

}  // namespace frenetk::io

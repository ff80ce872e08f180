#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "frenetk/io/trace_io.hpp"
#include "frenetk/planner.hpp"

namespace frenetk::io {

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void add(Vec2 p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
};

namespace detail {

inline std::string points_attr(const std::vector<Vec2>& pts) {
    std::string out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ' ';
        out += format_number(pts[i].x) + ',' + format_number(-pts[i].y);
    }
    return out;
}

}  // namespace detail

/// One planning frame: reference in blue, selected trajectory in red,
/// obstacle in black, agent as a triangle. y is flipped so +y points up.
inline std::string render_frame_svg(const Scenario& scenario, const PolylineRef& reference, const PlanTrace& trace,
                                    const TickRecord& rec) {
    Bounds b;
    for (const auto& p : reference.points()) b.add(p);
    for (const auto& p : rec.plan.selected_path) b.add(p);
    b.add(rec.agent.position);
    if (scenario.obstacle) {
        const auto& o = *scenario.obstacle;
        b.add(o.center - Vec2{o.radius, o.radius});
        b.add(o.center + Vec2{o.radius, o.radius});
    }
    const double margin = 2.0 + 0.05 * std::max(b.max_x - b.min_x, b.max_y - b.min_y);
    const double x0 = b.min_x - margin, y0 = -(b.max_y + margin);
    const double w = b.max_x - b.min_x + 2 * margin, h = b.max_y - b.min_y + 2 * margin;
    const double stroke = 0.004 * std::max(w, h);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_number(x0) << ' ' << format_number(y0)
       << ' ' << format_number(w) << ' ' << format_number(h) << "\" width=\"800\" height=\""
       << static_cast<int>(std::lround(800.0 * h / w)) << "\">\n";
    os << "<title>" << scenario.name << " " << mode_name(trace) << " tick " << rec.tick << "</title>\n";
    os << "<rect x=\"" << format_number(x0) << "\" y=\"" << format_number(y0) << "\" width=\"" << format_number(w)
       << "\" height=\"" << format_number(h) << "\" fill=\"white\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"" << format_number(stroke) << "\" points=\""
       << detail::points_attr(reference.points()) << "\"/>\n";
    if (scenario.obstacle) {
        const auto& o = *scenario.obstacle;
        const double r = o.radius;
        os << "<circle cx=\"" << format_number(o.center.x) << "\" cy=\"" << format_number(-o.center.y) << "\" r=\""
           << format_number(r) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"" << format_number(stroke)
           << "\"/>\n";
        const double k = r * std::sqrt(0.5);
        os << "<path stroke=\"black\" stroke-width=\"" << format_number(stroke) << "\" d=\"M"
           << format_number(o.center.x - k) << ',' << format_number(-o.center.y - k) << " L"
           << format_number(o.center.x + k) << ',' << format_number(-o.center.y + k) << " M"
           << format_number(o.center.x - k) << ',' << format_number(-o.center.y + k) << " L"
           << format_number(o.center.x + k) << ',' << format_number(-o.center.y - k) << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"" << format_number(stroke) << "\" points=\""
       << detail::points_attr(rec.plan.selected_path) << "\"/>\n";

    const double size = 1.0;
    const Vec2 fwd{std::cos(rec.agent.heading), std::sin(rec.agent.heading)};
    const Vec2 side = rotate90(fwd);
    const Vec2 p = rec.agent.position;
    const std::vector<Vec2> tri{p + fwd * size, p - fwd * (0.5 * size) + side * (0.5 * size),
                                p - fwd * (0.5 * size) - side * (0.5 * size)};
    os << "<polygon fill=\"black\" points=\"" << detail::points_attr(tri) << "\"/>\n";
    os << "</svg>\n";
    return os.str();
}

inline std::string frame_name(int tick) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "tick_%04d.svg", tick);
    return buf;
}

/// Writes one file per tick into dir; returns the number written.
inline std::size_t write_frames(const std::filesystem::path& dir, const Scenario& scenario,
                                const PolylineRef& reference, const PlanTrace& trace) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create '" + dir.string() + "': " + ec.message());
    for (const auto& rec : trace.ticks) {
        const auto path = dir / frame_name(rec.tick);
        auto os = open_output(path);
        os << render_frame_svg(scenario, reference, trace, rec);
        finish_output(os, path);
    }
    return trace.ticks.size();
}

}  // namespace frenetk::io

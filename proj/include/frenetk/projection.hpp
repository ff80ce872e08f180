#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "frenetk/geometry.hpp"
#include "frenetk/polyline.hpp"

namespace frenetk {

class DegenerateFanCenter : public std::domain_error {
public:
    DegenerateFanCenter() : std::domain_error("query point coincides with the bisector intersection of its piece") {}
};

/// Absolute-plus-relative band for "equally near" vertices.
inline double tie_tolerance(double min_distance) { return 1e-9 * (1.0 + min_distance); }

struct NearestSet {
    std::vector<std::size_t> indices;  // strictly increasing
    double min_distance = 0.0;
};

inline NearestSet nearest_set(const PolylineRef& polyline, Vec2 a) {
    const auto& pts = polyline.points();
    std::vector<double> dist(pts.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < pts.size(); ++c) {
        dist[c] = distance(a, pts[c]);
        best = std::min(best, dist[c]);
    }
    NearestSet out;
    out.min_distance = best;
    const double band = best + tie_tolerance(best);
    for (std::size_t c = 0; c < pts.size(); ++c) {
        if (dist[c] <= band) out.indices.push_back(c);
    }
    return out;
}

/// Orthogonal projection onto the line of piece m (piece 0 is the backward
/// ray from vertex 0). The lateral offset keeps its sign.
inline FrenetCoord parallel_trans(const PolylineRef& polyline, std::size_t m, Vec2 a) {
    const auto& pts = polyline.points();
    if (m >= pts.size()) throw std::out_of_range("parallel_trans: piece index out of range");
    Vec2 edge, v;
    double s = 0.0;
    if (m == 0) {
        edge = pts[1] - pts[0];
        v = a - pts[0];
    } else {
        edge = pts[m] - pts[m - 1];
        s = polyline.station(m - 1);
        v = a - pts[m - 1];
    }
    const double len = norm(edge);
    return {s + dot(v, edge) / len, cross(edge, v) / len};
}

/// Fan projection onto piece m (segment from vertex m-1 to vertex m) through
/// the intersection of the two junction bisectors. Collinear neighbours
/// reduce to parallel_trans.
inline FrenetCoord affine_trans(const PolylineRef& polyline, std::size_t m, Vec2 a) {
    const auto& pts = polyline.points();
    if (m < 1 || m >= pts.size()) throw std::out_of_range("affine_trans: piece index out of range");

    const Vec2 b1 = junction_bisector(polyline, m - 1);
    const Vec2 b2 = junction_bisector(polyline, m);
    if (nearly_parallel(b1, b2)) return parallel_trans(polyline, m, a);

    const Vec2 start = pts[m - 1];
    const Vec2 edge = pts[m] - start;
    const Vec2 center = line_intersection(start, b1, pts[m], b2);
    if (a == center) throw DegenerateFanCenter();
    const Vec2 foot = line_intersection(center, a - center, start, edge);

    const double len = norm(edge);
    return {polyline.station(m - 1) + dot(foot - start, edge) / len, cross(edge, a - start) / len};
}

enum class ProjectionRoute { affine, parallel, fallback };

struct ProjectionTrace {
    FrenetCoord coord;
    std::size_t nearest_index = 0;  // largest index in the nearest set
    std::size_t piece = 0;          // piece handed to the sub-transform
    ProjectionRoute route = ProjectionRoute::parallel;
};

/// Cartesian to Frenet: nearest vertex with largest-index tie-break, side
/// selection by inner products, then fan or orthogonal projection.
inline ProjectionTrace transf_kappa_traced(const PolylineRef& polyline, Vec2 a) {
    require_finite(a, "query point");
    const auto& pts = polyline.points();
    const std::size_t n = pts.size();
    const NearestSet near = nearest_set(polyline, a);

    ProjectionTrace out;
    std::size_t m = near.indices.back();
    out.nearest_index = m;

    if (m > 0 && m + 1 < n) {
        const Vec2 to_a = a - pts[m];
        const double v_plus = dot(to_a, pts[m + 1] - pts[m]);
        const double v_minus = dot(to_a, pts[m - 1] - pts[m]);
        if (v_minus < v_plus) ++m;
        out.piece = m;
        try {
            out.coord = affine_trans(polyline, m, a);
            out.route = ProjectionRoute::affine;
        } catch (const DegenerateFanCenter&) {
            out.coord = parallel_trans(polyline, m, a);
            out.route = ProjectionRoute::fallback;
        } catch (const ParallelError&) {
            out.coord = parallel_trans(polyline, m, a);
            out.route = ProjectionRoute::fallback;
        }
    } else {
        out.piece = m;
        out.coord = parallel_trans(polyline, m, a);
        out.route = ProjectionRoute::parallel;
    }
    return out;
}

inline FrenetCoord transf_kappa(const PolylineRef& polyline, Vec2 a) { return transf_kappa_traced(polyline, a).coord; }

/// Batch projection; results are ordered by input index.
inline std::vector<FrenetCoord> transf_kappa(const PolylineRef& polyline, const std::vector<Vec2>& queries) {
    std::vector<FrenetCoord> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(transf_kappa(polyline, q));
    return out;
}

/// Exhaustive nearest-foot search over the extended polyline at a fixed
/// station step. Used as an independent check of transf_kappa.
inline FrenetCoord brute_force_project(const PolylineRef& polyline, Vec2 a, double resolution,
                                       double extension = -1.0) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
    if (extension < 0.0) {
        const double reach = nearest_set(polyline, a).min_distance;
        extension = std::max(10.0 * reach, 10.0 * polyline.spacing());
    }
    const ExtendedPolyline ext(polyline);
    const double lo = -extension;
    const double hi = polyline.total_length() + extension;
    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / resolution));

    auto station = [&](std::size_t k) { return k == steps ? hi : lo + static_cast<double>(k) * resolution; };

    std::vector<double> dist(steps + 1);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= steps; ++k) {
        dist[k] = distance(a, ext.foot(station(k)));
        best = std::min(best, dist[k]);
    }
    std::size_t pick = 0;
    const double band = best + tie_tolerance(best);
    for (std::size_t k = 0; k <= steps; ++k) {
        if (dist[k] <= band) pick = k;
    }
    const double s = station(pick);
    const std::size_t piece = ext.piece_at(s);
    return {s, dot(a - ext.foot_on(piece, s), ext.normal_on(piece))};
}

struct FollowingOptions {
    double eps_mono = 1e-6;
    // Non-positive means 5 * spacing of the polyline.
    double jump_threshold = -1.0;
};

/// Direction-following diagnostics for a Cartesian path.
struct FollowingReport {
    std::vector<double> stations;
    std::vector<int> direction;  // sign of each station increment: -1, 0, +1
    bool reversal_detected = false;
    bool discontinuity_detected = false;
    double max_jump = 0.0;
    double min_increment = 0.0;
};

inline FollowingReport check_following(const PolylineRef& polyline, const std::vector<Vec2>& path,
                                       FollowingOptions options = {}) {
    if (path.size() < 2) throw std::invalid_argument("check_following needs at least two path points");
    const double jump = options.jump_threshold > 0.0 ? options.jump_threshold : 5.0 * polyline.spacing();

    FollowingReport report;
    report.stations.reserve(path.size());
    for (const auto& p : path) report.stations.push_back(transf_kappa(polyline, p).s);

    report.min_increment = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double delta = report.stations[i] - report.stations[i - 1];
        report.direction.push_back(delta > options.eps_mono ? 1 : (delta < -options.eps_mono ? -1 : 0));
        report.min_increment = std::min(report.min_increment, delta);
        report.max_jump = std::max(report.max_jump, std::abs(delta));
        const bool advanced = !(path[i] == path[i - 1]);
        if (advanced && delta < -options.eps_mono) report.reversal_detected = true;
        if (std::abs(delta) > jump) report.discontinuity_detected = true;
    }
    return report;
}

}  // namespace frenetk

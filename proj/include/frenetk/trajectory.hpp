#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "frenetk/curve.hpp"
#include "frenetk/geometry.hpp"
#include "frenetk/polyline.hpp"
#include "frenetk/projection.hpp"

namespace frenetk {

struct LateralInterval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double d) const { return lower <= d && d <= upper; }
    friend bool operator==(const LateralInterval&, const LateralInterval&) = default;
};

/// Lateral bounds for a contiguous run of polyline vertices starting at
/// first_index.
class CorridorBounds {
public:
    CorridorBounds() = default;
    CorridorBounds(std::size_t first_index, std::vector<LateralInterval> intervals)
        : first_(first_index), intervals_(std::move(intervals)) {
        for (std::size_t i = 0; i < intervals_.size(); ++i) {
            const auto& iv = intervals_[i];
            if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper) || iv.lower > iv.upper) {
                throw std::invalid_argument("corridor interval at station index " + std::to_string(first_ + i) +
                                            " is empty or not finite");
            }
        }
    }

    static CorridorBounds uniform(const PolylineRef& polyline, double lower, double upper) {
        return CorridorBounds(0, std::vector<LateralInterval>(polyline.size(), {lower, upper}));
    }

    std::size_t first_index() const { return first_; }
    std::size_t size() const { return intervals_.size(); }
    const std::vector<LateralInterval>& intervals() const { return intervals_; }
    const LateralInterval& at(std::size_t i) const { return intervals_.at(i); }
    LateralInterval& at(std::size_t i) { return intervals_.at(i); }

    /// Sub-range of polyline vertices [first, first + count), clipped to this corridor.
    CorridorBounds window(std::size_t first, std::size_t count) const {
        if (first < first_ || first >= first_ + intervals_.size()) throw std::out_of_range("corridor window start");
        const std::size_t begin = first - first_;
        const std::size_t end = std::min(intervals_.size(), begin + count);
        return CorridorBounds(first, std::vector<LateralInterval>(intervals_.begin() + begin, intervals_.begin() + end));
    }

    void check_against(const PolylineRef& polyline) const {
        if (first_ + intervals_.size() > polyline.size()) throw std::invalid_argument("corridor exceeds the polyline");
    }

private:
    std::size_t first_ = 0;
    std::vector<LateralInterval> intervals_;
};

enum class Provenance { baseline, repaired };

inline const char* to_string(Provenance p) { return p == Provenance::baseline ? "baseline" : "repaired"; }

struct CandidateTrajectory {
    std::vector<FrenetCoord> points;
    Provenance provenance = Provenance::baseline;
    std::uint64_t seed = 0;
};

/// Seeded source of lateral samples. The engine is std::mt19937_64, whose
/// output sequence is fixed by the standard; the real conversion uses the top
/// 53 bits so draws are identical on every conforming platform.
class LateralSampler {
public:
    explicit LateralSampler(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lower, double upper) { return lower + (upper - lower) * unit(); }

private:
    std::mt19937_64 engine_;
};

/// Corridor sampling: one uniform lateral draw per station, in station order.
/// May produce reversing or self-intersecting paths on tight bends.
inline CandidateTrajectory generate_baseline(const PolylineRef& polyline, const CorridorBounds& bounds,
                                             std::uint64_t seed) {
    bounds.check_against(polyline);
    LateralSampler rng(seed);
    CandidateTrajectory t;
    t.provenance = Provenance::baseline;
    t.seed = seed;
    t.points.reserve(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto& iv = bounds.at(i);
        const double d = rng.uniform(iv.lower, iv.upper);
        t.points.push_back({polyline.station(bounds.first_index() + i), d});
    }
    return t;
}

/// Keeps every point with curvature * d < 1 untouched; any other point is
/// re-projected through transf_kappa and the stations it jumps over are
/// dropped. Re-projections that land behind the last emitted point (or behind
/// their own station when nothing is emitted yet) are discarded. Output
/// stations are strictly increasing; the result can be empty.
inline CandidateTrajectory repair_trajectory(const ReferenceCurve& curve, const PolylineRef& polyline,
                                             const CandidateTrajectory& t) {
    CandidateTrajectory out;
    out.provenance = Provenance::repaired;
    out.seed = t.seed;
    const auto& in = t.points;

    std::size_t i = 0;
    while (i < in.size()) {
        const FrenetCoord p = in[i];
        const std::size_t vertex = polyline.vertex_at_or_before(p.s);
        const double kappa = curvature_at(curve, std::min(polyline.source_s()[vertex], curve.total_length()));
        if (kappa * p.d < 1.0) {
            out.points.push_back(p);
            ++i;
            continue;
        }

        const FrenetCoord q = transf_kappa(polyline, frenet_to_cartesian(polyline, p));
        const bool behind = out.points.empty() ? q.s < p.s : !(q.s > out.points.back().s);
        if (behind) {
            // Landed behind what is already emitted, or behind the start.
            ++i;
            continue;
        }
        out.points.push_back(q);

        std::size_t j = i + 1;
        while (j < in.size() && !(in[j].s > q.s)) ++j;
        i = j;
    }
    return out;
}

inline std::vector<Vec2> render_cartesian(const PolylineRef& polyline, const CandidateTrajectory& t) {
    std::vector<Vec2> out;
    out.reserve(t.points.size());
    for (const auto& p : t.points) out.push_back(frenet_to_cartesian(polyline, p));
    return out;
}

/// Number of crossing pairs among non-adjacent pieces of a Cartesian path.
inline std::size_t count_self_intersections(const std::vector<Vec2>& path, bool stop_at_first = false) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (path[i] == path[i + 1]) continue;
        const Segment a(path[i], path[i + 1]);
        for (std::size_t j = i + 2; j + 1 < path.size(); ++j) {
            if (path[j] == path[j + 1]) continue;
            if (segments_intersect(a, Segment(path[j], path[j + 1]))) {
                ++hits;
                if (stop_at_first) return hits;
            }
        }
    }
    return hits;
}

struct CandidateReport {
    bool monotone = true;
    bool self_intersection = false;
    double max_kappa_d = 0.0;
    std::size_t bound_violations = 0;
    FollowingReport following;

    bool anomalous() const { return !monotone || self_intersection || following.reversal_detected; }
};

inline CandidateReport validate_candidate(const PolylineRef& polyline, const CandidateTrajectory& t,
                                          const CorridorBounds* bounds = nullptr) {
    if (t.points.empty()) throw std::invalid_argument("cannot validate an empty trajectory");
    CandidateReport r;
    for (std::size_t i = 1; i < t.points.size(); ++i) {
        if (!(t.points[i].s > t.points[i - 1].s)) r.monotone = false;
    }
    for (const auto& p : t.points) {
        r.max_kappa_d = std::max(r.max_kappa_d, std::abs(polyline.curvature_near(p.s) * p.d));
    }
    if (bounds != nullptr) {
        for (const auto& p : t.points) {
            const std::size_t v = polyline.vertex_at_or_before(p.s);
            if (v < bounds->first_index() || v >= bounds->first_index() + bounds->size()) continue;
            if (!bounds->at(v - bounds->first_index()).contains(p.d)) ++r.bound_violations;
        }
    }
    const auto path = render_cartesian(polyline, t);
    r.self_intersection = count_self_intersections(path, true) > 0;
    if (path.size() >= 2) r.following = check_following(polyline, path);
    return r;
}

}  // namespace frenetk

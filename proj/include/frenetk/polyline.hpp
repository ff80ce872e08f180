#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "frenetk/curve.hpp"
#include "frenetk/geometry.hpp"

namespace frenetk {

/// Station and signed lateral offset; d > 0 on the left of travel.
struct FrenetCoord {
    double s = 0.0;
    double d = 0.0;

    friend bool operator==(const FrenetCoord&, const FrenetCoord&) = default;
};

struct SamplingLimits {
    double max_turn_deg = 10.0;
    // spacing * max|curvature| must not exceed this.
    double spacing_curvature_ratio = 0.1;
    // Relative tolerance for the uniform-spacing check.
    double spacing_rel_tol = 1e-6;
};

class SamplingError : public std::runtime_error {
public:
    enum class Kind { too_few_points, duplicate_point, non_uniform_spacing, turn_angle, spacing_curvature, bad_spacing };

    SamplingError(Kind kind, std::size_t index, double value, double limit, const std::string& message)
        : std::runtime_error(message), kind(kind), index(index), value(value), limit(limit) {}

    Kind kind;
    std::size_t index;
    double value;
    double limit;
};

/// Sampled reference polyline with cumulative stations.
///
/// Vertex c sits at station cumulative_s()[c]. Pieces are numbered so that
/// piece k (1 <= k < size) is the segment from vertex k-1 to vertex k, and
/// piece 0 is the backward ray through vertex 0. The last piece continues
/// forward past the final vertex.
class PolylineRef {
public:
    /// Strictly validated polyline: uniform spacing (except the final
    /// interval), bounded turning angles and bounded spacing-curvature product.
    static PolylineRef from_samples(std::vector<Vec2> points, double spacing, std::vector<double> source_s,
                                    std::vector<double> curvature, const SamplingLimits& limits = {},
                                    double kappa_bound = 0.0) {
        PolylineRef p(std::move(points));
        if (source_s.size() != p.points_.size() || curvature.size() != p.points_.size()) {
            throw std::invalid_argument("per-vertex arrays must match the point count");
        }
        p.spacing_ = spacing;
        p.source_s_ = std::move(source_s);
        p.curvature_ = std::move(curvature);
        p.kappa_max_ = kappa_bound;
        for (double k : p.curvature_) p.kappa_max_ = std::max(p.kappa_max_, std::abs(k));
        p.validate(limits);
        return p;
    }

    /// Arbitrary vertex chain with only structural checks. Spacing is the
    /// longest piece; per-vertex curvature is the discrete turning estimate.
    static PolylineRef from_vertices(std::vector<Vec2> points) {
        PolylineRef p(std::move(points));
        const std::size_t n = p.points_.size();
        p.spacing_ = 0.0;
        for (std::size_t c = 1; c < n; ++c) p.spacing_ = std::max(p.spacing_, p.cumulative_s_[c] - p.cumulative_s_[c - 1]);
        p.source_s_ = p.cumulative_s_;
        p.curvature_.assign(n, 0.0);
        for (std::size_t c = 1; c + 1 < n; ++c) {
            const Vec2 u = p.points_[c] - p.points_[c - 1];
            const Vec2 v = p.points_[c + 1] - p.points_[c];
            const double turn = std::atan2(cross(u, v), dot(u, v));
            p.curvature_[c] = 2.0 * turn / (norm(u) + norm(v));
        }
        p.kappa_max_ = 0.0;
        for (double k : p.curvature_) p.kappa_max_ = std::max(p.kappa_max_, std::abs(k));
        return p;
    }

    std::size_t size() const { return points_.size(); }
    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<double>& cumulative_s() const { return cumulative_s_; }
    const std::vector<double>& source_s() const { return source_s_; }
    const std::vector<double>& curvature() const { return curvature_; }
    double spacing() const { return spacing_; }
    double kappa_max() const { return kappa_max_; }
    double total_length() const { return cumulative_s_.back(); }

    Vec2 point(std::size_t c) const { return points_.at(c); }
    double station(std::size_t c) const { return cumulative_s_.at(c); }

    /// Unit heading of piece k; piece 0 shares the heading of piece 1.
    Vec2 piece_direction(std::size_t k) const {
        const std::size_t seg = std::max<std::size_t>(k, 1);
        return normalized(points_.at(seg) - points_.at(seg - 1));
    }

    /// Turning angle (radians, unsigned) at interior vertex c.
    double turn_angle(std::size_t c) const {
        const Vec2 u = points_.at(c) - points_.at(c - 1);
        const Vec2 v = points_.at(c + 1) - points_.at(c);
        return std::abs(std::atan2(cross(u, v), dot(u, v)));
    }

    /// Index of the largest vertex whose station does not exceed s, clamped to [0, size-1].
    std::size_t vertex_at_or_before(double s) const {
        const auto it = std::upper_bound(cumulative_s_.begin(), cumulative_s_.end(), s);
        if (it == cumulative_s_.begin()) return 0;
        return static_cast<std::size_t>(it - cumulative_s_.begin()) - 1;
    }

    /// Per-vertex signed curvature interpolated at station s (piecewise constant, joint goes right).
    double curvature_near(double s) const { return curvature_[vertex_at_or_before(s)]; }

private:
    explicit PolylineRef(std::vector<Vec2> points) : points_(std::move(points)) {
        if (points_.size() < 2) {
            throw SamplingError(SamplingError::Kind::too_few_points, 0, static_cast<double>(points_.size()), 2.0,
                                "polyline needs at least 2 points");
        }
        cumulative_s_.reserve(points_.size());
        cumulative_s_.push_back(0.0);
        for (std::size_t c = 0; c < points_.size(); ++c) {
            require_finite(points_[c], "polyline point");
            if (c == 0) continue;
            const double len = distance(points_[c - 1], points_[c]);
            if (!(len > 0.0)) {
                throw SamplingError(SamplingError::Kind::duplicate_point, c, 0.0, 0.0,
                                    "consecutive polyline points coincide at index " + std::to_string(c));
            }
            cumulative_s_.push_back(cumulative_s_.back() + len);
        }
    }

    void validate(const SamplingLimits& limits) const {
        if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
            throw SamplingError(SamplingError::Kind::bad_spacing, 0, spacing_, 0.0, "spacing must be positive");
        }
        const std::size_t n = points_.size();
        for (std::size_t c = 1; c + 1 < n; ++c) {
            const double len = distance(points_[c - 1], points_[c]);
            if (std::abs(len - spacing_) > limits.spacing_rel_tol * spacing_) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "interval ending at index " << c << " has length " << len << ", expected " << spacing_;
                throw SamplingError(SamplingError::Kind::non_uniform_spacing, c, len, spacing_, msg.str());
            }
        }
        const double max_turn = limits.max_turn_deg * std::numbers::pi / 180.0;
        for (std::size_t c = 1; c + 1 < n; ++c) {
            const double a = turn_angle(c);
            if (a > max_turn) {
                std::ostringstream msg;
                msg << "turning angle " << a * 180.0 / std::numbers::pi << " deg at index " << c << " exceeds "
                    << limits.max_turn_deg << " deg (spacing " << spacing_ << ")";
                throw SamplingError(SamplingError::Kind::turn_angle, c, a * 180.0 / std::numbers::pi,
                                    limits.max_turn_deg, msg.str());
            }
        }
        const double ratio = spacing_ * kappa_max_;
        if (ratio > limits.spacing_curvature_ratio) {
            std::size_t worst = 0;
            for (std::size_t c = 1; c < n; ++c) {
                if (std::abs(curvature_[c]) > std::abs(curvature_[worst])) worst = c;
            }
            std::ostringstream msg;
            msg << "spacing " << spacing_ << " times max curvature " << kappa_max_ << " = " << ratio
                << " (near index " << worst << ") exceeds " << limits.spacing_curvature_ratio;
            throw SamplingError(SamplingError::Kind::spacing_curvature, worst, ratio, limits.spacing_curvature_ratio,
                                msg.str());
        }
    }

    std::vector<Vec2> points_;
    std::vector<double> cumulative_s_;
    std::vector<double> source_s_;
    std::vector<double> curvature_;
    double spacing_ = 0.0;
    double kappa_max_ = 0.0;
};

/// Samples the curve so that every interval except possibly the last has
/// chord length exactly `spacing`, then validates the result.
inline PolylineRef sample_polyline(const ReferenceCurve& curve, double spacing, const SamplingLimits& limits = {}) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw SamplingError(SamplingError::Kind::bad_spacing, 0, spacing, 0.0, "spacing must be positive");
    }
    const double total = curve.total_length();
    std::vector<double> stations{0.0};
    std::vector<Vec2> points{curve.position(0.0)};

    while (true) {
        const double s0 = stations.back();
        const Vec2 p0 = points.back();
        auto chord = [&](double s) { return distance(p0, curve.position(s)); };

        if (chord(total) < spacing) {
            if (chord(total) < 1e-6 * spacing) {
                stations.back() = total;
                points.back() = curve.position(total);
            } else {
                stations.push_back(total);
                points.push_back(curve.position(total));
            }
            break;
        }
        double hi = std::min(s0 + spacing, total);
        double lo = s0;
        const double at_hi = chord(hi);
        double s_next = hi;
        if (std::abs(at_hi - spacing) > 1e-12 * spacing) {
            while (chord(hi) < spacing) {
                lo = hi;
                hi = std::min(hi + spacing, total);
            }
            for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                (chord(mid) < spacing ? lo : hi) = mid;
            }
            s_next = 0.5 * (lo + hi);
        }
        stations.push_back(s_next);
        points.push_back(curve.position(s_next));
    }

    std::vector<double> kappa;
    kappa.reserve(stations.size());
    for (double s : stations) kappa.push_back(curvature_at(curve, s));

    // Bisection leaves chords within ~1e-14 of spacing; the final one is exempt.
    return PolylineRef::from_samples(std::move(points), spacing, std::move(stations), std::move(kappa), limits,
                                     curve.max_abs_curvature());
}

/// The polyline with its first and last pieces continued to infinite rays.
class ExtendedPolyline {
public:
    explicit ExtendedPolyline(const PolylineRef& polyline) : poly_(&polyline) {}

    const PolylineRef& base() const { return *poly_; }

    /// Piece containing station s; joints belong to the piece with the larger index.
    std::size_t piece_at(double s) const {
        const auto& cum = poly_->cumulative_s();
        const std::size_t n = cum.size();
        if (s < 0.0) return 0;
        if (s >= cum.back()) return n - 1;
        return std::min(poly_->vertex_at_or_before(s) + 1, n - 1);
    }

    /// Point on the extended polyline at station s.
    Vec2 foot(double s) const { return foot_on(piece_at(s), s); }

    Vec2 foot_on(std::size_t k, double s) const {
        const auto& pts = poly_->points();
        const auto& cum = poly_->cumulative_s();
        const std::size_t n = pts.size();
        const Vec2 u = poly_->piece_direction(k);
        if (k == 0) return pts[0] + s * u;
        if (k == n - 1 && s >= cum[n - 1]) return pts[n - 1] + (s - cum[n - 1]) * u;
        return pts[k - 1] + (s - cum[k - 1]) * u;
    }

    Vec2 normal_on(std::size_t k) const { return rotate90(poly_->piece_direction(k)); }

private:
    const PolylineRef* poly_;
};

inline ExtendedPolyline extend_rays(const PolylineRef& polyline) { return ExtendedPolyline(polyline); }

/// Heading of the angular bisector line at vertex j. At an end vertex the
/// line is the normal of the single incident piece.
inline Vec2 junction_bisector(const PolylineRef& polyline, std::size_t j) {
    const std::size_t n = polyline.size();
    if (j == 0) return rotate90(polyline.piece_direction(1));
    if (j + 1 >= n) return rotate90(polyline.piece_direction(n - 1));
    return normalized(rotate90(polyline.piece_direction(j) + polyline.piece_direction(j + 1)));
}

/// Plain Eq.-1 style offset: foot on the piece plus d along that piece's normal.
inline Vec2 offset_along_piece_normal(const PolylineRef& polyline, FrenetCoord f) {
    const ExtendedPolyline ext(polyline);
    const std::size_t k = ext.piece_at(f.s);
    return ext.foot_on(k, f.s) + f.d * ext.normal_on(k);
}

/// Frenet to Cartesian on the polyline approximation (zero tangential offset).
///
/// Inside a piece the point is placed on the line from the bisector
/// intersection of that piece through the foot, at lateral distance d from
/// the piece line, which inverts the fan projection exactly. Pieces with
/// parallel bisectors and the extension rays use the plain normal offset.
inline Vec2 frenet_to_cartesian(const PolylineRef& polyline, FrenetCoord f) {
    if (!std::isfinite(f.s) || !std::isfinite(f.d)) throw GeometryError("Frenet coordinate is not finite");
    const ExtendedPolyline ext(polyline);
    const std::size_t k = ext.piece_at(f.s);
    const Vec2 foot = ext.foot_on(k, f.s);
    if (f.d == 0.0) return foot;
    if (k == 0 || f.s >= polyline.total_length()) return foot + f.d * ext.normal_on(k);

    const Vec2 b1 = junction_bisector(polyline, k - 1);
    const Vec2 b2 = junction_bisector(polyline, k);
    if (nearly_parallel(b1, b2)) return foot + f.d * ext.normal_on(k);

    const Vec2 start = polyline.point(k - 1);
    const Vec2 center = line_intersection(start, b1, polyline.point(k), b2);
    const double height = signed_line_offset(center, start, polyline.piece_direction(k));
    return center + (1.0 - f.d / height) * (foot - center);
}

}  // namespace frenetk

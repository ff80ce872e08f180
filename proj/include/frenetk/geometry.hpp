#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frenetk {

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParallelError : public std::runtime_error {
public:
    ParallelError() : std::runtime_error("lines are parallel") {}
};

// Relative, scale-normalized parallelism threshold.
inline constexpr double kParallelEps = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double k) { x *= k; y *= k; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double k) { return {k * a.x, k * a.y}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline constexpr double dot(Vec2 u, Vec2 v) { return u.x * v.x + u.y * v.y; }

// z-component of the 3-D cross product.
inline constexpr double cross(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

// Counterclockwise quarter turn; the left normal of a heading.
inline constexpr Vec2 rotate90(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 normalized(Vec2 v) {
    const double n = norm(v);
    if (!(n > 0.0)) {
        throw GeometryError("cannot normalize a zero vector");
    }
    return {v.x / n, v.y / n};
}

inline Vec2 require_finite(Vec2 v, const char* what = "point") {
    if (!v.finite()) {
        throw GeometryError(std::string(what) + " has a non-finite component");
    }
    return v;
}

/// A closed segment with distinct endpoints.
class Segment {
public:
    Segment(Vec2 a, Vec2 b) : a_(require_finite(a, "segment start")), b_(require_finite(b, "segment end")) {
        if (a_ == b_) {
            throw GeometryError("degenerate segment: endpoints coincide");
        }
    }

    Vec2 a() const { return a_; }
    Vec2 b() const { return b_; }
    Vec2 direction() const { return b_ - a_; }
    double length() const { return norm(b_ - a_); }

private:
    Vec2 a_;
    Vec2 b_;
};

/// Perpendicular distance from `p` to the infinite line supporting `seg`.
inline double point_to_segment_distance(Vec2 p, const Segment& seg) {
    const Vec2 e = seg.direction();
    return std::abs(cross(e, p - seg.a())) / norm(e);
}

/// Signed version: positive when `p` is left of the segment heading.
inline double signed_line_offset(Vec2 p, Vec2 origin, Vec2 heading) {
    return cross(heading, p - origin) / norm(heading);
}

/// Distance to the closed segment (foot clamped to the endpoints).
inline double point_to_segment_clamped_distance(Vec2 p, const Segment& seg) {
    const Vec2 e = seg.direction();
    const double t = std::clamp(dot(p - seg.a(), e) / dot(e, e), 0.0, 1.0);
    return distance(p, seg.a() + t * e);
}

namespace detail {

inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

// c is known collinear with ab; test whether it lies within the bounding box.
inline bool within_box(Vec2 a, Vec2 b, Vec2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// True iff the two closed segments share at least one point.
inline bool segments_intersect(const Segment& s1, const Segment& s2) {
    const Vec2 p1 = s1.a(), q1 = s1.b(), p2 = s2.a(), q2 = s2.b();
    const int o1 = detail::orientation(p1, q1, p2);
    const int o2 = detail::orientation(p1, q1, q2);
    const int o3 = detail::orientation(p2, q2, p1);
    const int o4 = detail::orientation(p2, q2, q1);

    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && detail::within_box(p1, q1, p2)) return true;
    if (o2 == 0 && detail::within_box(p1, q1, q2)) return true;
    if (o3 == 0 && detail::within_box(p2, q2, p1)) return true;
    if (o4 == 0 && detail::within_box(p2, q2, q1)) return true;
    return false;
}

inline bool nearly_parallel(Vec2 u, Vec2 v) {
    return std::abs(cross(u, v)) <= kParallelEps * norm(u) * norm(v);
}

/// Intersection of the lines p1 + t*dir1 and p2 + u*dir2.
/// Throws ParallelError when the directions are parallel within kParallelEps.
inline Vec2 line_intersection(Vec2 p1, Vec2 dir1, Vec2 p2, Vec2 dir2) {
    if (!(norm(dir1) > 0.0) || !(norm(dir2) > 0.0)) {
        throw GeometryError("line direction must be nonzero");
    }
    const double denom = cross(dir1, dir2);
    if (std::abs(denom) <= kParallelEps * norm(dir1) * norm(dir2)) {
        throw ParallelError();
    }
    const double t = cross(p2 - p1, dir2) / denom;
    return p1 + t * dir1;
}

/// True when the closed segment comes within `radius` of `center`.
inline bool segment_hits_disc(Vec2 a, Vec2 b, Vec2 center, double radius) {
    if (a == b) {
        return distance(a, center) <= radius;
    }
    return point_to_segment_clamped_distance(center, Segment(a, b)) <= radius;
}

}  // namespace frenetk

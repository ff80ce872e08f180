#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "frenetk/geometry.hpp"

namespace frenetk {

class CurveError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class StationOutOfRange : public std::out_of_range {
public:
    StationOutOfRange(double s, double length)
        : std::out_of_range("station " + std::to_string(s) + " outside [0, " + std::to_string(length) + "]"),
          station(s) {}
    double station;
};

struct LinePiece {
    Vec2 start;
    Vec2 heading;  // unit
    double length;

    LinePiece(Vec2 a, Vec2 b) : start(a), heading(normalized(b - a)), length(distance(a, b)) {}

    Vec2 position(double t) const { return start + t * heading; }
    Vec2 tangent(double) const { return heading; }
    double curvature(double) const { return 0.0; }
};

/// Circular arc; positive sweep turns counterclockwise.
struct ArcPiece {
    Vec2 center;
    double radius;
    double start_angle;
    double sweep;

    ArcPiece(Vec2 c, double r, double theta0, double dtheta) : center(c), radius(r), start_angle(theta0), sweep(dtheta) {
        if (!(r > 0.0) || !std::isfinite(r)) throw CurveError("arc radius must be positive and finite");
        if (!(std::abs(dtheta) > 0.0) || !std::isfinite(dtheta)) throw CurveError("arc sweep must be nonzero");
        if (std::abs(dtheta) >= 2.0 * std::numbers::pi) throw CurveError("closed arcs are not supported");
    }

    double length() const { return radius * std::abs(sweep); }
    double direction() const { return sweep > 0.0 ? 1.0 : -1.0; }
    double angle(double t) const { return start_angle + direction() * t / radius; }

    Vec2 position(double t) const {
        const double a = angle(t);
        return center + radius * Vec2{std::cos(a), std::sin(a)};
    }
    Vec2 tangent(double t) const {
        const double a = angle(t);
        return direction() * Vec2{-std::sin(a), std::cos(a)};
    }
    double curvature(double) const { return direction() / radius; }
};

namespace detail {

// Natural cubic spline of one coordinate over knots u.
struct CubicCoeffs {
    std::vector<double> a, b, c, d;

    static CubicCoeffs natural(std::span<const double> u, std::span<const double> y) {
        const std::size_t n = u.size() - 1;
        std::vector<double> h(n), alpha(n + 1, 0.0), l(n + 1, 1.0), mu(n + 1, 0.0), z(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) h[i] = u[i + 1] - u[i];
        for (std::size_t i = 1; i < n; ++i) {
            alpha[i] = 3.0 / h[i] * (y[i + 1] - y[i]) - 3.0 / h[i - 1] * (y[i] - y[i - 1]);
        }
        for (std::size_t i = 1; i < n; ++i) {
            l[i] = 2.0 * (u[i + 1] - u[i - 1]) - h[i - 1] * mu[i - 1];
            mu[i] = h[i] / l[i];
            z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
        }
        CubicCoeffs k;
        k.a.assign(y.begin(), y.end() - 1);
        k.b.resize(n);
        k.c.assign(n + 1, 0.0);
        k.d.resize(n);
        for (std::size_t jj = n; jj-- > 0;) {
            k.c[jj] = z[jj] - mu[jj] * k.c[jj + 1];
            k.b[jj] = (y[jj + 1] - y[jj]) / h[jj] - h[jj] * (k.c[jj + 1] + 2.0 * k.c[jj]) / 3.0;
            k.d[jj] = (k.c[jj + 1] - k.c[jj]) / (3.0 * h[jj]);
        }
        k.c.pop_back();
        return k;
    }

    double value(std::size_t i, double t) const { return a[i] + t * (b[i] + t * (c[i] + t * d[i])); }
    double first(std::size_t i, double t) const { return b[i] + t * (2.0 * c[i] + 3.0 * t * d[i]); }
    double second(std::size_t i, double t) const { return 2.0 * c[i] + 6.0 * t * d[i]; }
};

}  // namespace detail

/// Natural cubic spline through waypoints, reparameterized by arclength.
class SplinePiece {
public:
    explicit SplinePiece(std::vector<Vec2> waypoints) : waypoints_(std::move(waypoints)) {
        if (waypoints_.size() < 3) throw CurveError("spline needs at least 3 waypoints");
        knots_.push_back(0.0);
        for (std::size_t i = 1; i < waypoints_.size(); ++i) {
            require_finite(waypoints_[i], "spline waypoint");
            const double h = distance(waypoints_[i - 1], waypoints_[i]);
            if (!(h > 0.0)) throw CurveError("spline waypoints must be distinct");
            knots_.push_back(knots_.back() + h);
        }
        std::vector<double> xs, ys;
        for (const auto& p : waypoints_) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        cx_ = detail::CubicCoeffs::natural(knots_, xs);
        cy_ = detail::CubicCoeffs::natural(knots_, ys);
        build_arclength_table();
    }

    double length() const { return table_s_.back(); }
    const std::vector<Vec2>& waypoints() const { return waypoints_; }

    Vec2 position(double t) const {
        const auto [i, v] = locate(param_at(t));
        return {cx_.value(i, v), cy_.value(i, v)};
    }
    Vec2 tangent(double t) const {
        const auto [i, v] = locate(param_at(t));
        return normalized({cx_.first(i, v), cy_.first(i, v)});
    }
    double curvature(double t) const {
        const auto [i, v] = locate(param_at(t));
        const Vec2 d1{cx_.first(i, v), cy_.first(i, v)};
        const Vec2 d2{cx_.second(i, v), cy_.second(i, v)};
        const double speed = norm(d1);
        return cross(d1, d2) / (speed * speed * speed);
    }

private:
    static constexpr int kSubdivisions = 32;
    static constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                       0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665,
                                                         0.5688888888888889, 0.4786286704993665,
                                                         0.2369268850561891};

    std::pair<std::size_t, double> locate(double u) const {
        std::size_t i = 0;
        const std::size_t last = knots_.size() - 2;
        while (i < last && u >= knots_[i + 1]) ++i;
        return {i, u - knots_[i]};
    }

    double speed(double u) const {
        const auto [i, v] = locate(u);
        return std::hypot(cx_.first(i, v), cy_.first(i, v));
    }

    double integrate(double u0, double u1) const {
        const double half = 0.5 * (u1 - u0), mid = 0.5 * (u1 + u0);
        double sum = 0.0;
        for (std::size_t k = 0; k < kGaussNodes.size(); ++k) sum += kGaussWeights[k] * speed(mid + half * kGaussNodes[k]);
        return half * sum;
    }

    void build_arclength_table() {
        table_u_.push_back(0.0);
        table_s_.push_back(0.0);
        for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
            const double h = (knots_[i + 1] - knots_[i]) / kSubdivisions;
            for (int k = 1; k <= kSubdivisions; ++k) {
                const double u0 = knots_[i] + (k - 1) * h;
                const double u1 = k == kSubdivisions ? knots_[i + 1] : knots_[i] + k * h;
                table_s_.push_back(table_s_.back() + integrate(u0, u1));
                table_u_.push_back(u1);
            }
        }
    }

    // Inverse of the arclength function: bracket in the table, then Newton with bisection guard.
    double param_at(double s) const {
        if (s <= 0.0) return 0.0;
        if (s >= table_s_.back()) return table_u_.back();
        std::size_t lo = 0, hi = table_s_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t m = (lo + hi) / 2;
            (table_s_[m] <= s ? lo : hi) = m;
        }
        double a = table_u_[hi - 1], b = table_u_[hi];
        const double s0 = table_s_[hi - 1];
        double u = a + (b - a) * (s - s0) / (table_s_[hi] - s0);
        for (int iter = 0; iter < 50; ++iter) {
            const double f = s0 + integrate(table_u_[hi - 1], u) - s;
            if (std::abs(f) < 1e-11) break;
            if (f > 0.0) b = u; else a = u;
            double next = u - f / speed(u);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            u = next;
        }
        return u;
    }

    std::vector<Vec2> waypoints_;
    std::vector<double> knots_;
    detail::CubicCoeffs cx_, cy_;
    std::vector<double> table_u_, table_s_;
};

using CurvePiece = std::variant<LinePiece, ArcPiece, SplinePiece>;

/// Arclength-parameterized planar curve made of C1-joined pieces.
///
/// The normal is the tangent rotated a quarter turn counterclockwise, so
/// positive curvature means the curve bends toward the left.
class ReferenceCurve {
public:
    static constexpr double kJoinTolerance = 1e-6;

    explicit ReferenceCurve(std::vector<CurvePiece> pieces) : pieces_(std::move(pieces)) {
        if (pieces_.empty()) throw CurveError("reference curve needs at least one piece");
        starts_.push_back(0.0);
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const double len = piece_length(pieces_[i]);
            if (!(len > 0.0)) throw CurveError("curve piece " + std::to_string(i) + " has zero length");
            if (i > 0) {
                const Vec2 end_prev = eval_position(pieces_[i - 1], piece_length(pieces_[i - 1]));
                const Vec2 start_next = eval_position(pieces_[i], 0.0);
                if (distance(end_prev, start_next) > kJoinTolerance) {
                    throw CurveError("curve pieces " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                     " do not meet");
                }
                const Vec2 t0 = eval_tangent(pieces_[i - 1], piece_length(pieces_[i - 1]));
                const Vec2 t1 = eval_tangent(pieces_[i], 0.0);
                if (std::abs(cross(t0, t1)) > kJoinTolerance || dot(t0, t1) < 0.0) {
                    throw CurveError("curve pieces " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                     " are not tangent-continuous");
                }
            }
            starts_.push_back(starts_.back() + len);
        }
    }

    static ReferenceCurve line(Vec2 a, Vec2 b) { return ReferenceCurve({LinePiece(a, b)}); }
    static ReferenceCurve arc(Vec2 center, double radius, double start_angle, double sweep) {
        return ReferenceCurve({ArcPiece(center, radius, start_angle, sweep)});
    }
    static ReferenceCurve spline(std::vector<Vec2> waypoints) { return ReferenceCurve({SplinePiece(std::move(waypoints))}); }

    double total_length() const { return starts_.back(); }
    const std::vector<CurvePiece>& pieces() const { return pieces_; }

    Vec2 position(double s) const {
        const auto [i, t] = locate(s);
        return eval_position(pieces_[i], t);
    }
    Vec2 tangent(double s) const {
        const auto [i, t] = locate(s);
        return eval_tangent(pieces_[i], t);
    }
    Vec2 normal(double s) const { return rotate90(tangent(s)); }

    /// Signed curvature <dt/ds, n> at station s.
    double curvature(double s) const {
        const auto [i, t] = locate(s);
        return std::visit([t](const auto& p) { return p.curvature(t); }, pieces_[i]);
    }

    /// Upper bound of |curvature| from a dense scan (exact for lines and arcs).
    double max_abs_curvature() const {
        double k = 0.0;
        for (const auto& piece : pieces_) {
            if (const auto* arc = std::get_if<ArcPiece>(&piece)) {
                k = std::max(k, 1.0 / arc->radius);
            } else if (const auto* sp = std::get_if<SplinePiece>(&piece)) {
                const int n = std::max(200, static_cast<int>(sp->length() * 50.0));
                for (int j = 0; j <= n; ++j) k = std::max(k, std::abs(sp->curvature(sp->length() * j / n)));
            }
        }
        return k;
    }

private:
    static double piece_length(const CurvePiece& p) {
        return std::visit([](const auto& q) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(q)>, LinePiece>) return q.length;
            else return q.length();
        }, p);
    }
    static Vec2 eval_position(const CurvePiece& p, double t) {
        return std::visit([t](const auto& q) { return q.position(t); }, p);
    }
    static Vec2 eval_tangent(const CurvePiece& p, double t) {
        return std::visit([t](const auto& q) { return q.tangent(t); }, p);
    }

    std::pair<std::size_t, double> locate(double s) const {
        constexpr double kSlack = 1e-9;
        if (!std::isfinite(s) || s < -kSlack || s > total_length() + kSlack) throw StationOutOfRange(s, total_length());
        s = std::clamp(s, 0.0, total_length());
        std::size_t i = 0;
        while (i + 1 < pieces_.size() && s >= starts_[i + 1]) ++i;
        return {i, std::min(s - starts_[i], piece_length(pieces_[i]))};
    }

    std::vector<CurvePiece> pieces_;
    std::vector<double> starts_;
};

inline double curvature_at(const ReferenceCurve& curve, double s) { return curve.curvature(s); }

}  // namespace frenetk

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frenetk/curve.hpp"
#include "frenetk/planner.hpp"
#include "frenetk/polyline.hpp"
#include "oracles.hpp"

using namespace frenetk;
constexpr double kPi = std::numbers::pi;

namespace {

ReferenceCurve wavy_spline() {
    return ReferenceCurve::spline({{0, 0}, {20, 5}, {40, -2.5}, {60, 10}, {80, 7.5}, {100, 0}});
}

std::vector<ReferenceCurve> sample_curves() {
    return {ReferenceCurve::line({0, 0}, {10, 3}), ReferenceCurve::arc({0, 0}, 10, 0, kPi),
            ReferenceCurve::arc({5, 5}, 7, 1.0, -2.0), wavy_spline(), scenarios::u_road_curve()};
}

}  // namespace

TEST(Curvature, LineIsZero) {
    const auto c = ReferenceCurve::line({0, 0}, {10, 0});
    for (double s : {0.0, 2.5, 10.0}) EXPECT_EQ(curvature_at(c, s), 0.0);
}

TEST(Curvature, CounterclockwiseArc) {
    const auto c = ReferenceCurve::arc({0, 0}, 10, 0, kPi);
    for (double s : {0.0, 5.0, 31.0}) EXPECT_DOUBLE_EQ(curvature_at(c, s), 0.1);
    const auto cw = ReferenceCurve::arc({0, 0}, 10, 0, -kPi);
    EXPECT_DOUBLE_EQ(curvature_at(cw, 3.0), -0.1);
}

TEST(Curvature, SplineMidParameterMatchesFiniteDifferences) {
    const auto c = wavy_spline();
    const double mid = 0.5 * c.total_length();
    EXPECT_NEAR(curvature_at(c, mid), oracle::fd_curvature_position(c, mid), 1e-4);
}

TEST(Curvature, OutOfRangeThrows) {
    const auto c = ReferenceCurve::line({0, 0}, {10, 0});
    EXPECT_THROW(curvature_at(c, -1.0), StationOutOfRange);
    EXPECT_THROW(curvature_at(c, 10.5), StationOutOfRange);
}

TEST(Curvature, TangentDifferenceOracleOnArcsAndSplines) {
    std::mt19937_64 rng(21);
    for (const auto& c : {ReferenceCurve::arc({0, 0}, 10, 0, kPi), ReferenceCurve::arc({1, 2}, 4, 2.0, -3.0),
                          wavy_spline()}) {
        for (int i = 0; i < 100; ++i) {
            const double s = oracle::uniform(rng, 0.01, c.total_length() - 0.01);
            EXPECT_NEAR(curvature_at(c, s), oracle::fd_curvature_tangent(c, s), 1e-4) << "s=" << s;
        }
    }
}

TEST(ReferenceCurve, FrameIsOrthonormalAndCounterclockwise) {
    std::mt19937_64 rng(1);
    for (const auto& c : sample_curves()) {
        for (int i = 0; i < 100; ++i) {
            const double s = oracle::uniform(rng, 0, c.total_length());
            const Vec2 t = c.tangent(s), n = c.normal(s);
            EXPECT_NEAR(norm(t), 1.0, 1e-9);
            EXPECT_NEAR(norm(n), 1.0, 1e-9);
            EXPECT_NEAR(dot(t, n), 0.0, 1e-9);
            EXPECT_NEAR(cross(t, n), 1.0, 1e-9);
        }
    }
}

TEST(ReferenceCurve, PositionIsArclengthParameterized) {
    std::mt19937_64 rng(2);
    for (const auto& c : sample_curves()) {
        for (int i = 0; i < 100; ++i) {
            const double s = oracle::uniform(rng, 0, c.total_length() - 1e-2);
            for (double h : {1e-3, 1e-4}) {
                const Vec2 err = c.position(s + h) - c.position(s) - h * c.tangent(s);
                EXPECT_LE(norm(err), 1.0 * h * h) << "s=" << s << " h=" << h;
            }
        }
    }
}

TEST(ReferenceCurve, CompositeRequiresTangentContinuity) {
    EXPECT_THROW(ReferenceCurve({LinePiece({0, 0}, {1, 0}), LinePiece({1, 0}, {1, 1})}), CurveError);
    EXPECT_THROW(ReferenceCurve({LinePiece({0, 0}, {1, 0}), LinePiece({2, 0}, {3, 0})}), CurveError);
    EXPECT_NO_THROW(scenarios::u_road_curve());
}

TEST(SamplePolyline, StraightLine) {
    const auto p = sample_polyline(ReferenceCurve::line({0, 0}, {10, 0}), 1.0);
    ASSERT_EQ(p.size(), 11u);
    for (std::size_t c = 0; c < p.size(); ++c) {
        EXPECT_NEAR(p.point(c).x, static_cast<double>(c), 1e-12);
        EXPECT_EQ(p.point(c).y, 0.0);
    }
    for (std::size_t c = 1; c + 1 < p.size(); ++c) EXPECT_EQ(p.turn_angle(c), 0.0);
}

TEST(SamplePolyline, ArcRadiusTenSpacingOneAccepted) {
    const auto p = sample_polyline(ReferenceCurve::arc({0, 0}, 10, 0, kPi), 1.0);
    // Exterior angle of an inscribed polygon with chord 1 on radius 10.
    const double expected = 2 * std::asin(0.5 / 10.0);
    for (std::size_t c = 1; c + 2 < p.size(); ++c) EXPECT_NEAR(p.turn_angle(c), expected, 1e-9);
    EXPECT_LT(expected * 180 / kPi, 10.0);
    EXPECT_NEAR(expected * 180 / kPi, 5.73, 0.01);
}

TEST(SamplePolyline, ArcRadiusTenSpacingTwoRejected) {
    try {
        sample_polyline(ReferenceCurve::arc({0, 0}, 10, 0, kPi), 2.0);
        FAIL() << "expected SamplingError";
    } catch (const SamplingError& e) {
        EXPECT_EQ(e.kind, SamplingError::Kind::turn_angle);
        EXPECT_NEAR(e.value, 2 * std::asin(0.1) * 180 / kPi, 1e-9);
        EXPECT_GT(e.value, 10.0);
        EXPECT_GE(e.index, 1u);
    }
}

TEST(SamplePolyline, SpacingCurvatureRatioEnforced) {
    // R = 8: about 7.2 deg per joint, but spacing * kappa = 0.125.
    try {
        sample_polyline(ReferenceCurve::arc({0, 0}, 8, 0, 1.0), 1.0);
        FAIL() << "expected SamplingError";
    } catch (const SamplingError& e) {
        EXPECT_EQ(e.kind, SamplingError::Kind::spacing_curvature);
        EXPECT_NEAR(e.value, 0.125, 1e-12);
    }
}

TEST(SamplePolyline, UniformChordsAndMonotoneStations) {
    for (const auto& c : sample_curves()) {
        const auto p = sample_polyline(c, 0.25);
        for (std::size_t k = 1; k + 1 < p.size(); ++k) {
            EXPECT_NEAR(distance(p.point(k - 1), p.point(k)), 0.25, 1e-6 * 0.25);
        }
        for (std::size_t k = 1; k < p.size(); ++k) EXPECT_GT(p.station(k), p.station(k - 1));
        EXPECT_EQ(p.station(0), 0.0);
        EXPECT_EQ(p.points().back(), c.position(c.total_length()));
    }
}

TEST(SamplePolyline, ChordShorteningBoundOnCircles) {
    for (double r : {10.0, 15.0, 40.0}) {
        for (double spacing : {0.5, 1.0}) {
            const auto c = ReferenceCurve::arc({0, 0}, r, 0.3, kPi);
            const auto p = sample_polyline(c, spacing);
            const double kmax = 1.0 / r;
            const double bound = 0.5 * kmax * kmax * spacing * spacing * c.total_length();
            EXPECT_LE(c.total_length() - p.total_length(), bound);
            EXPECT_GE(c.total_length() - p.total_length(), 0.0);
        }
    }
}

TEST(FrenetToCartesian, Examples) {
    const auto x = sample_polyline(ReferenceCurve::line({0, 0}, {10, 0}), 1.0);
    const Vec2 a = frenet_to_cartesian(x, {3, 2});
    EXPECT_NEAR(a.x, 3, 1e-12);
    EXPECT_NEAR(a.y, 2, 1e-12);
    const Vec2 b = frenet_to_cartesian(x, {12, 1});
    EXPECT_NEAR(b.x, 12, 1e-12);
    EXPECT_NEAR(b.y, 1, 1e-12);
}

TEST(FrenetToCartesian, VerticesAreExact) {
    for (const auto& c : sample_curves()) {
        const auto p = sample_polyline(c, 0.5);
        for (std::size_t k = 0; k < p.size(); ++k) EXPECT_EQ(frenet_to_cartesian(p, {p.station(k), 0.0}), p.point(k));
    }
}

TEST(FrenetToCartesian, LateralDistanceFromPieceLineIsD) {
    const auto p = sample_polyline(scenarios::u_road_curve(), 0.5);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        const double s = oracle::uniform(rng, 0.01, p.total_length() - 0.01);
        const double d = oracle::uniform(rng, -6, 6);
        const Vec2 x = frenet_to_cartesian(p, {s, d});
        const std::size_t k = ExtendedPolyline(p).piece_at(s);
        EXPECT_NEAR(signed_line_offset(x, p.point(k - 1), p.piece_direction(k)), d, 1e-9);
    }
}

TEST(ExtendRays, Examples) {
    const auto x = sample_polyline(ReferenceCurve::line({0, 0}, {10, 0}), 1.0);
    const auto ext = extend_rays(x);
    EXPECT_EQ(ext.foot(-5.0), (Vec2{-5, 0}));
    const Vec2 f = ext.foot(x.total_length() + 3.0);
    EXPECT_NEAR(f.x, 13.0, 1e-12);
    EXPECT_NEAR(f.y, 0.0, 1e-12);

    const auto l = PolylineRef::from_vertices({{0, 0}, {1, 0}, {1, 1}});
    const Vec2 back = extend_rays(l).foot(-2.0);
    EXPECT_EQ(back, (Vec2{-2, 0}));
}

TEST(PolylineRef, FromVerticesRejectsDuplicates) {
    EXPECT_THROW(PolylineRef::from_vertices({{0, 0}, {0, 0}, {1, 0}}), SamplingError);
    EXPECT_ANY_THROW(PolylineRef::from_vertices({{0, 0}}));
}

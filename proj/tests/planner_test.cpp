#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "frenetk/io/trace_io.hpp"
#include "frenetk/planner.hpp"

using namespace frenetk;

namespace {

Scenario narrow_straight() {
    Scenario s = scenarios::straight();
    s.lane_half_width = 3.0;
    return s;
}

std::string csv_of(const PlanTrace& t) {
    std::ostringstream os;
    io::write_csv_rows(os, t);
    return os.str();
}

bool executed_path_clear(const Scenario& sc, const PlanTrace& t) {
    const double reach = sc.obstacle->radius + sc.clearance;
    for (std::size_t i = 1; i < t.executed_path.size(); ++i) {
        if (segment_hits_disc(t.executed_path[i - 1], t.executed_path[i], sc.obstacle->center, reach)) return false;
    }
    return true;
}

}  // namespace

TEST(BuildCorridor, NoObstacle) {
    const auto sc = narrow_straight();
    const auto p = sample_polyline(sc.reference, sc.spacing);
    const auto c = build_corridor(sc, p);
    ASSERT_EQ(c.size(), p.size());
    for (const auto& iv : c.intervals()) EXPECT_EQ(iv, (LateralInterval{-3, 3}));
}

TEST(BuildCorridor, ObstacleOutsideCorridorLeavesItUnchanged) {
    auto sc = narrow_straight();
    sc.obstacle = Obstacle{{20, 10}, 1.0};
    const auto p = sample_polyline(sc.reference, sc.spacing);
    for (const auto& iv : build_corridor(sc, p).intervals()) EXPECT_EQ(iv, (LateralInterval{-3, 3}));
}

TEST(BuildCorridor, ObstacleSliceShrinksTheNearSide) {
    auto sc = narrow_straight();
    sc.obstacle = Obstacle{{20, 1.5}, 1.0};
    sc.clearance = 0.5;
    const auto p = sample_polyline(sc.reference, sc.spacing);
    const auto c = build_corridor(sc, p);
    const double reach = 1.5;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double along = 20.0 - p.point(k).x;
        LateralInterval expect{-3, 3};
        if (std::abs(along) < reach) expect.upper = 1.5 - std::sqrt(reach * reach - along * along);
        EXPECT_NEAR(c.at(k).lower, expect.lower, 1e-12) << k;
        EXPECT_NEAR(c.at(k).upper, expect.upper, 1e-12) << k;
    }
    // The station beside the obstacle center gets exactly 1.5 - 1 - clearance.
    EXPECT_EQ(c.at(40), (LateralInterval{-3, 1.5 - 1.0 - 0.5}));
}

TEST(BuildCorridor, BlockedLaneIsReported) {
    auto sc = narrow_straight();
    sc.obstacle = Obstacle{{20, 0}, 4.0};
    const auto p = sample_polyline(sc.reference, sc.spacing);
    try {
        build_corridor(sc, p);
        FAIL();
    } catch (const InfeasibleCorridor& e) {
        // The grown disc (reach 4.5) overlaps both lane edges where its
        // half-chord exceeds 3.
        std::vector<std::size_t> expect;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double along = 20.0 - p.point(k).x;
            if (std::abs(along) < 4.5 && std::sqrt(4.5 * 4.5 - along * along) > 3.0) expect.push_back(k);
        }
        EXPECT_EQ(e.stations, expect);
    }
}

TEST(BuildCorridor, WideVariantOpensOnlyTheInnerSideOfTheBend) {
    const auto sc = scenarios::u_road_wide();
    const auto p = sample_polyline(sc.reference, sc.spacing);
    const auto c = build_corridor(sc, p);
    for (std::size_t k = 0; k < p.size(); ++k) {
        EXPECT_EQ(c.at(k).lower, -6.0);
        if (p.curvature()[k] > 0) {
            EXPECT_LE(c.at(k).upper, 20.0);
        } else {
            EXPECT_LE(c.at(k).upper, 6.0);
        }
    }
    EXPECT_EQ(c.at(p.vertex_at_or_before(40.0)).upper, 20.0);
}

TEST(ScoreCandidate, Examples) {
    const auto p = sample_polyline(ReferenceCurve::line({0, 0}, {20, 0}), 0.5);
    const CostWeights w;
    auto score = [&](const CandidateTrajectory& t, std::optional<Obstacle> ob) {
        const auto r = validate_candidate(p, t);
        const auto path = render_cartesian(p, t);
        return score_candidate(t, r, path, ob, 0.5, w);
    };
    const auto zero = generate_baseline(p, CorridorBounds::uniform(p, 0, 0), 0);
    EXPECT_EQ(score(zero, std::nullopt), 0.0);
    EXPECT_EQ(score(zero, Obstacle{{10, 0.2}, 1.0}), std::numeric_limits<double>::infinity());

    const auto one = generate_baseline(p, CorridorBounds::uniform(p, 1, 1), 0);
    const auto two = generate_baseline(p, CorridorBounds::uniform(p, 2, 2), 0);
    EXPECT_LT(score(one, std::nullopt), score(two, std::nullopt));
    EXPECT_NEAR(score(one, std::nullopt), 0.1 * static_cast<double>(p.size()), 1e-9);
}

TEST(ScoreCandidate, BoundViolationsArePenalised) {
    const auto p = sample_polyline(ReferenceCurve::line({0, 0}, {5, 0}), 0.5);
    const auto t = generate_baseline(p, CorridorBounds::uniform(p, 2, 2), 0);
    const auto tight = CorridorBounds::uniform(p, -1, 1);
    const auto r = validate_candidate(p, t, &tight);
    const auto path = render_cartesian(p, t);
    const CostWeights w;
    EXPECT_EQ(r.bound_violations, p.size());
    EXPECT_NEAR(score_candidate(t, r, path, std::nullopt, 0, w),
                0.1 * 4 * static_cast<double>(p.size()) + 100.0 * static_cast<double>(p.size()), 1e-9);
}

TEST(PlanStep, StraightRoadPrefersCenterline) {
    const auto sc = scenarios::straight();
    const auto [p, c] = prepare(sc);
    const auto step = plan_step(sc, p, c, {sc.agent_start, 0.0}, false);
    EXPECT_EQ(step.diagnostics.anomalous, 0u);
    EXPECT_EQ(step.candidates.size(), 64u);
    for (const auto& cand : step.candidates) EXPECT_GE(cand.cost, step.selected_summary.cost);
    double mean = 0;
    for (const auto& q : step.selected.points) mean += std::abs(q.d);
    mean /= static_cast<double>(step.selected.points.size());
    // A uniform draw on [-6, 6] averages 3 in magnitude.
    EXPECT_LT(mean, 3.0);
    EXPECT_EQ(step.selected.points.front().d, 0.0);
}

TEST(PlanStep, ArcEntryBaselineProducesAnomalies) {
    const auto sc = scenarios::u_road_wide();
    const auto [p, c] = prepare(sc);
    const auto step = plan_step(sc, p, c, {{30, 0}, 0.0}, false);
    EXPECT_GE(step.diagnostics.anomalous, 1u);
    EXPECT_GE(step.diagnostics.reversals + step.diagnostics.self_intersections, 1u);
}

// With repair, the selected plan is clean and station-monotone. Some repaired
// candidates still cross themselves: the straight segment into a re-projected
// point spans the bend. Every repaired anomaly here is such a crossing, and
// their number is far below the baseline's.
TEST(PlanStep, ArcEntryRepairedSelectionIsClean) {
    const auto sc = scenarios::u_road_wide();
    const auto [p, c] = prepare(sc);
    const auto base = plan_step(sc, p, c, {{30, 0}, 0.0}, false);
    const auto step = plan_step(sc, p, c, {{30, 0}, 0.0}, true);
    EXPECT_FALSE(step.selected_summary.anomalous());
    for (std::size_t i = 1; i < step.selected.points.size(); ++i) {
        EXPECT_GT(step.selected.points[i].s, step.selected.points[i - 1].s);
    }
    EXPECT_EQ(step.diagnostics.non_monotone, 0u);
    EXPECT_EQ(step.diagnostics.reversals, 0u);
    EXPECT_LT(4 * step.diagnostics.anomalous, base.diagnostics.anomalous);
    for (const auto& cand : step.candidates) {
        if (cand.anomalous()) EXPECT_TRUE(cand.discontinuity) << cand.seed;
    }
}

TEST(PlanStep, SeedsFollowTheTickLayout) {
    PlannerParams params;
    params.base_seed = 10;
    EXPECT_EQ(candidate_seed(params, 0, 0), 10u);
    EXPECT_EQ(candidate_seed(params, 2, 5), 10u + 5u + 128u);
}

TEST(RunSimulation, StraightRoadReachesGoal) {
    const auto sc = scenarios::straight();
    const auto trace = run_simulation(sc, false);
    const auto p = sample_polyline(sc.reference, sc.spacing);
    EXPECT_TRUE(trace.goal_reached);
    const auto stride = static_cast<std::size_t>(sc.planner.replan_stride);
    EXPECT_EQ(trace.ticks.size(), (p.size() - 1 + stride - 1) / stride);
    for (const auto& x : trace.executed_path) {
        const auto f = transf_kappa(p, x);
        EXPECT_LE(std::abs(f.d), sc.lane_half_width);
    }
    for (std::size_t i = 1; i < trace.ticks.size(); ++i) EXPECT_GT(trace.ticks[i].tick, trace.ticks[i - 1].tick);
}

TEST(RunSimulation, URoadRepairedIsCleanAndCollisionFree) {
    const auto sc = scenarios::u_road();
    const auto trace = run_simulation(sc, true);
    EXPECT_TRUE(trace.goal_reached);
    EXPECT_TRUE(executed_path_clear(sc, trace));
    for (const auto& rec : trace.ticks) {
        EXPECT_EQ(rec.plan.diagnostics.reversals, 0u) << rec.tick;
        EXPECT_FALSE(rec.plan.selected_summary.anomalous()) << rec.tick;
    }
}

TEST(RunSimulation, WideBaselineSelectsAnomalousPlan) {
    auto sc = scenarios::u_road_wide();
    sc.planner.base_seed = 42;
    const auto trace = run_simulation_recorded(sc, false);
    EXPECT_GE(trace.anomalous_selected(), 1u);
}

TEST(RunSimulation, WideRepairedSelectionsAreClean) {
    auto sc = scenarios::u_road_wide();
    for (std::uint64_t seed : {0ull, 7ull, 42ull}) {
        sc.planner.base_seed = seed;
        const auto trace = run_simulation(sc, true);
        EXPECT_TRUE(trace.goal_reached);
        EXPECT_EQ(trace.anomalous_selected(), 0u);
        EXPECT_TRUE(executed_path_clear(sc, trace));
        for (const auto& rec : trace.ticks) {
            const auto& pts = rec.plan.selected.points;
            for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GT(pts[i].s, pts[i - 1].s);
            EXPECT_EQ(count_self_intersections(rec.plan.selected_path), 0u);
        }
    }
}

TEST(RunSimulation, Deterministic) {
    auto sc = scenarios::u_road_wide();
    sc.planner.base_seed = 42;
    for (bool repair : {false, true}) {
        const auto a = run_simulation_recorded(sc, repair);
        const auto b = run_simulation_recorded(sc, repair);
        EXPECT_EQ(csv_of(a), csv_of(b));
        EXPECT_EQ(a.executed_path, b.executed_path);
    }
}

TEST(RunSimulation, SelectionInvariantUnderWeightScaling) {
    auto sc = scenarios::u_road_wide();
    sc.planner.base_seed = 42;
    const auto a = run_simulation_recorded(sc, true);
    auto scaled = sc;
    scaled.planner.weights.smoothness *= 4.0;
    scaled.planner.weights.centerline *= 4.0;
    scaled.planner.weights.bounds *= 4.0;
    const auto b = run_simulation_recorded(scaled, true);
    ASSERT_EQ(a.ticks.size(), b.ticks.size());
    for (std::size_t i = 0; i < a.ticks.size(); ++i) {
        EXPECT_EQ(a.ticks[i].plan.selected.seed, b.ticks[i].plan.selected.seed) << i;
    }
}

TEST(RunSimulation, InfeasibleStepCarriesTheTick) {
    auto sc = scenarios::straight();
    sc.lane_half_width = 3.0;
    // The corridor stays open beside the obstacle, but the grown disc covers
    // the agent's start, so every candidate's first leg collides.
    sc.obstacle = Obstacle{{0, -2.6}, 0.5};
    sc.clearance = 2.2;
    try {
        run_simulation(sc, false);
        FAIL() << "expected NoFeasibleCandidate";
    } catch (const SimulationFailure& e) {
        EXPECT_EQ(e.tick, 0);
        EXPECT_EQ(e.trace.failed_tick, 0);
    }
}

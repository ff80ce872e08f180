#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frenetk/curve.hpp"
#include "frenetk/geometry.hpp"
#include "frenetk/polyline.hpp"
#include "frenetk/projection.hpp"
#include "frenetk/trajectory.hpp"

namespace frenetk {

struct Obstacle {
    Vec2 center;
    double radius = 0.0;
};

struct CostWeights {
    double smoothness = 1.0;   // sum |delta d|
    double centerline = 0.1;   // sum d^2
    double bounds = 100.0;     // per point outside the corridor
};

struct PlannerParams {
    int num_candidates = 64;
    int horizon_stations = 40;
    int replan_stride = 5;
    std::uint64_t base_seed = 0;
    CostWeights weights;
    // Zero selects a limit derived from the polyline length.
    int max_ticks = 0;
};

struct Scenario {
    std::string name;
    ReferenceCurve reference;
    double spacing = 0.5;
    double lane_half_width = 6.0;
    // When set, curved stations use this half-width on the inner side of the bend.
    std::optional<double> inner_half_width_on_curve;
    std::optional<Obstacle> obstacle;
    double clearance = 0.5;
    Vec2 agent_start;
    double agent_heading = 0.0;
    // Negative means the end of the reference.
    double goal_station = -1.0;
    PlannerParams planner;

    double resolved_goal(const PolylineRef& polyline) const {
        return goal_station < 0.0 ? polyline.total_length() : goal_station;
    }
};

class InfeasibleCorridor : public std::runtime_error {
public:
    explicit InfeasibleCorridor(std::vector<std::size_t> stations)
        : std::runtime_error("corridor is empty at " + std::to_string(stations.size()) + " station(s), first index " +
                             std::to_string(stations.empty() ? 0 : stations.front())),
          stations(std::move(stations)) {}
    std::vector<std::size_t> stations;
};

/// Lane interval per vertex, shrunk on the obstacle side wherever the
/// vertex's lateral line crosses the obstacle disc grown by the clearance.
inline CorridorBounds build_corridor(const Scenario& scenario, const PolylineRef& polyline) {
    const ExtendedPolyline ext(polyline);
    std::vector<LateralInterval> iv(polyline.size(), {-scenario.lane_half_width, scenario.lane_half_width});

    if (scenario.inner_half_width_on_curve) {
        for (std::size_t c = 0; c < polyline.size(); ++c) {
            const double k = polyline.curvature()[c];
            if (k > 0.0) iv[c].upper = *scenario.inner_half_width_on_curve;
            if (k < 0.0) iv[c].lower = -*scenario.inner_half_width_on_curve;
        }
    }

    std::vector<std::size_t> empty;
    if (scenario.obstacle) {
        const double reach = scenario.obstacle->radius + scenario.clearance;
        for (std::size_t c = 0; c < polyline.size(); ++c) {
            const double s = polyline.station(c);
            const std::size_t piece = ext.piece_at(s);
            const Vec2 rel = scenario.obstacle->center - polyline.point(c);
            const double along = dot(rel, polyline.piece_direction(piece));
            const double lateral = dot(rel, ext.normal_on(piece));
            if (std::abs(along) >= reach) continue;
            const double half = std::sqrt(reach * reach - along * along);
            const double lo = lateral - half, hi = lateral + half;
            if (hi < iv[c].lower || lo > iv[c].upper) continue;
            if (lateral >= 0.0) iv[c].upper = std::min(iv[c].upper, lo);
            else iv[c].lower = std::max(iv[c].lower, hi);
            if (iv[c].lower > iv[c].upper) empty.push_back(c);
        }
    }
    if (!empty.empty()) throw InfeasibleCorridor(std::move(empty));
    return CorridorBounds(0, std::move(iv));
}

/// Stand-in for a downstream optimizer: lateral smoothness, centerline
/// adherence and corridor violations, infinite on collision with the grown
/// obstacle. `rendered` is the Cartesian path checked for collision.
inline double score_candidate(const CandidateTrajectory& t, const CandidateReport& report,
                              std::span<const Vec2> rendered, const std::optional<Obstacle>& obstacle,
                              double clearance, const CostWeights& w) {
    if (t.points.empty()) throw std::invalid_argument("cannot score an empty trajectory");
    if (obstacle) {
        const double reach = obstacle->radius + clearance;
        for (std::size_t i = 0; i < rendered.size(); ++i) {
            const Vec2 b = rendered[i];
            const Vec2 a = i == 0 ? b : rendered[i - 1];
            if (segment_hits_disc(a, b, obstacle->center, reach)) return std::numeric_limits<double>::infinity();
        }
    }
    double smooth = 0.0, center = 0.0;
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        center += t.points[i].d * t.points[i].d;
        if (i > 0) smooth += std::abs(t.points[i].d - t.points[i - 1].d);
    }
    return w.smoothness * smooth + w.centerline * center + w.bounds * static_cast<double>(report.bound_violations);
}

struct AgentState {
    Vec2 position;
    double heading = 0.0;
};

struct CandidateSummary {
    std::uint64_t seed = 0;
    double cost = 0.0;
    std::size_t points = 0;
    bool monotone = true;
    bool self_intersection = false;
    bool reversal = false;
    bool discontinuity = false;
    double max_kappa_d = 0.0;

    bool anomalous() const { return !monotone || self_intersection || reversal; }
};

struct StepDiagnostics {
    std::size_t reversals = 0;
    std::size_t self_intersections = 0;
    std::size_t non_monotone = 0;
    std::size_t anomalous = 0;
    std::size_t infeasible = 0;
};

struct PlanStep {
    FrenetCoord agent_frenet;
    std::size_t window_start = 0;
    CandidateTrajectory selected;
    std::vector<Vec2> selected_path;
    CandidateSummary selected_summary;
    std::vector<CandidateSummary> candidates;
    StepDiagnostics diagnostics;
};

class NoFeasibleCandidate : public std::runtime_error {
public:
    explicit NoFeasibleCandidate(int tick)
        : std::runtime_error("no feasible candidate at tick " + std::to_string(tick)), tick(tick) {}
    int tick;
};

inline std::uint64_t candidate_seed(const PlannerParams& p, int tick, int index) {
    return p.base_seed + static_cast<std::uint64_t>(index) +
           static_cast<std::uint64_t>(tick) * static_cast<std::uint64_t>(p.num_candidates);
}

/// One replanning cycle: sample candidates over the horizon starting at the
/// agent's station, optionally repair them, then pick the cheapest.
inline PlanStep plan_step(const Scenario& scenario, const PolylineRef& polyline, const CorridorBounds& corridor,
                          const AgentState& agent, bool use_repair, int tick = 0) {
    const auto& params = scenario.planner;
    PlanStep step;
    step.agent_frenet = transf_kappa(polyline, agent.position);

    const auto& cum = polyline.cumulative_s();
    const double tol = 1e-6 * polyline.spacing();
    const auto first = std::lower_bound(cum.begin(), cum.end(), step.agent_frenet.s - tol);
    step.window_start = first == cum.end() ? polyline.size() - 1 : static_cast<std::size_t>(first - cum.begin());

    CorridorBounds window = corridor.window(step.window_start, static_cast<std::size_t>(params.horizon_stations));
    // The plan starts where the agent is.
    auto& head = window.at(0);
    const double pinned = std::clamp(step.agent_frenet.d, head.lower, head.upper);
    const CorridorBounds scored = window;
    head = {pinned, pinned};

    std::optional<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<CandidateTrajectory> trajectories;
    std::vector<std::vector<Vec2>> paths;
    trajectories.reserve(static_cast<std::size_t>(params.num_candidates));

    for (int k = 0; k < params.num_candidates; ++k) {
        CandidateTrajectory t = generate_baseline(polyline, window, candidate_seed(params, tick, k));
        if (use_repair) t = repair_trajectory(scenario.reference, polyline, t);
        if (t.points.empty()) {
            CandidateSummary none;
            none.seed = t.seed;
            none.cost = std::numeric_limits<double>::infinity();
            ++step.diagnostics.infeasible;
            step.candidates.push_back(none);
            trajectories.push_back(std::move(t));
            paths.emplace_back();
            continue;
        }
        const CandidateReport report = validate_candidate(polyline, t, &scored);

        std::vector<Vec2> path{agent.position};
        const auto rendered = render_cartesian(polyline, t);
        path.insert(path.end(), rendered.begin(), rendered.end());
        const double cost = score_candidate(t, report, path, scenario.obstacle, scenario.clearance, params.weights);

        CandidateSummary sum{t.seed,
                             cost,
                             t.points.size(),
                             report.monotone,
                             report.self_intersection,
                             report.following.reversal_detected,
                             report.following.discontinuity_detected,
                             report.max_kappa_d};
        step.diagnostics.reversals += sum.reversal;
        step.diagnostics.self_intersections += sum.self_intersection;
        step.diagnostics.non_monotone += !sum.monotone;
        step.diagnostics.anomalous += sum.anomalous();
        step.diagnostics.infeasible += !std::isfinite(cost);

        if (std::isfinite(cost) && (!best || cost < best_cost ||
                                    (cost == best_cost && t.seed < step.candidates[*best].seed))) {
            best = step.candidates.size();
            best_cost = cost;
        }
        step.candidates.push_back(sum);
        trajectories.push_back(std::move(t));
        paths.push_back(rendered);
    }
    if (!best) throw NoFeasibleCandidate(tick);
    step.selected = std::move(trajectories[*best]);
    step.selected_path = std::move(paths[*best]);
    step.selected_summary = step.candidates[*best];
    return step;
}

struct TickRecord {
    int tick = 0;
    AgentState agent;
    PlanStep plan;
};

struct PlanTrace {
    std::string scenario;
    bool use_repair = false;
    std::uint64_t base_seed = 0;
    std::vector<TickRecord> ticks;
    std::vector<Vec2> executed_path;
    bool goal_reached = false;
    std::optional<int> failed_tick;
    std::string failure;

    std::size_t anomalous_selected() const {
        return static_cast<std::size_t>(std::count_if(ticks.begin(), ticks.end(), [](const TickRecord& r) {
            return r.plan.selected_summary.anomalous();
        }));
    }
};

/// Thrown by run_simulation; carries the trace recorded up to the failure.
class SimulationFailure : public NoFeasibleCandidate {
public:
    SimulationFailure(int tick, PlanTrace partial) : NoFeasibleCandidate(tick), trace(std::move(partial)) {}
    PlanTrace trace;
};

struct SimulationSetup {
    PolylineRef polyline;
    CorridorBounds corridor;
};

inline SimulationSetup prepare(const Scenario& scenario) {
    PolylineRef polyline = sample_polyline(scenario.reference, scenario.spacing);
    CorridorBounds corridor = build_corridor(scenario, polyline);
    return {std::move(polyline), std::move(corridor)};
}

/// Receding-horizon loop: plan, move replan_stride points along the plan,
/// repeat until the goal station or the tick limit.
inline PlanTrace run_simulation(const Scenario& scenario, bool use_repair) {
    const SimulationSetup setup = prepare(scenario);
    const auto& polyline = setup.polyline;
    const auto& params = scenario.planner;
    if (params.num_candidates < 1 || params.horizon_stations < 2 || params.replan_stride < 1) {
        throw std::invalid_argument("planner needs >= 1 candidate, horizon >= 2 and stride >= 1");
    }

    PlanTrace trace;
    trace.scenario = scenario.name;
    trace.use_repair = use_repair;
    trace.base_seed = params.base_seed;

    const double goal = scenario.resolved_goal(polyline);
    const int limit = params.max_ticks > 0
                          ? params.max_ticks
                          : 4 * static_cast<int>(polyline.size() / static_cast<std::size_t>(params.replan_stride)) + 20;

    AgentState agent{scenario.agent_start, scenario.agent_heading};
    trace.executed_path.push_back(agent.position);
    const double goal_tol = 1e-6 * polyline.spacing();

    for (int tick = 0; tick < limit; ++tick) {
        if (transf_kappa(polyline, agent.position).s >= goal - goal_tol) {
            trace.goal_reached = true;
            break;
        }
        PlanStep step;
        try {
            step = plan_step(scenario, polyline, setup.corridor, agent, use_repair, tick);
        } catch (const NoFeasibleCandidate& e) {
            trace.failed_tick = tick;
            trace.failure = e.what();
            throw SimulationFailure(tick, std::move(trace));
        }

        TickRecord rec{tick, agent, std::move(step)};
        const auto& path = rec.plan.selected_path;
        const std::size_t reach = std::min<std::size_t>(static_cast<std::size_t>(params.replan_stride), path.size() - 1);
        for (std::size_t i = 0; i <= reach; ++i) trace.executed_path.push_back(path[i]);
        const Vec2 next = path[reach];
        const Vec2 from = reach > 0 ? path[reach - 1] : agent.position;
        if (!(next == from)) {
            const Vec2 dir = next - from;
            agent.heading = std::atan2(dir.y, dir.x);
        }
        agent.position = next;
        trace.ticks.push_back(std::move(rec));
    }
    if (!trace.goal_reached && transf_kappa(polyline, agent.position).s >= goal - goal_tol) trace.goal_reached = true;
    return trace;
}

/// Runs and returns the trace whether or not planning failed part way.
inline PlanTrace run_simulation_recorded(const Scenario& scenario, bool use_repair) {
    try {
        return run_simulation(scenario, use_repair);
    } catch (SimulationFailure& f) {
        return std::move(f.trace);
    }
}

namespace scenarios {

// Lengths in meters; the arc turns left so its inner side is +d.
inline constexpr double kUArcRadius = 15.0;
inline constexpr double kUStraight = 30.0;

inline ReferenceCurve u_road_curve(double radius = kUArcRadius, double straight = kUStraight) {
    const double pi = std::numbers::pi;
    return ReferenceCurve({LinePiece({0.0, 0.0}, {straight, 0.0}),
                           ArcPiece({straight, radius}, radius, -pi / 2.0, pi),
                           LinePiece({straight, 2.0 * radius}, {0.0, 2.0 * radius})});
}

inline Scenario straight() {
    return Scenario{.name = "straight",
                    .reference = ReferenceCurve::line({0.0, 0.0}, {60.0, 0.0}),
                    .spacing = 0.5,
                    .lane_half_width = 6.0,
                    .inner_half_width_on_curve = std::nullopt,
                    .obstacle = std::nullopt,
                    .clearance = 0.5,
                    .agent_start = {0.0, 0.0},
                    .agent_heading = 0.0,
                    .goal_station = -1.0,
                    .planner = {}};
}

inline Scenario u_road() {
    Scenario s = straight();
    s.name = "u_road";
    s.reference = u_road_curve();
    // Near the apex, on the inner side of the bend.
    s.obstacle = Obstacle{{kUStraight + kUArcRadius - 2.0, kUArcRadius}, 1.5};
    return s;
}

inline Scenario u_road_wide() {
    Scenario s = u_road();
    s.name = "u_road_wide";
    s.inner_half_width_on_curve = 20.0;
    return s;
}

/// Semicircle of radius 10 for the constant-offset counterexample.
inline constexpr double kFig3bRadius = 10.0;

inline Scenario fig3b() {
    Scenario s = straight();
    s.name = "fig3b";
    s.reference = ReferenceCurve::arc({0.0, 0.0}, kFig3bRadius, 0.0, std::numbers::pi);
    s.lane_half_width = 3.0;
    s.agent_start = {kFig3bRadius, 0.0};
    s.agent_heading = std::numbers::pi / 2.0;
    return s;
}

inline std::optional<Scenario> by_name(const std::string& name) {
    if (name == "straight") return straight();
    if (name == "u_road") return u_road();
    if (name == "u_road_wide") return u_road_wide();
    if (name == "fig3b") return fig3b();
    return std::nullopt;
}

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> all{"straight", "u_road", "u_road_wide", "fig3b"};
    return all;
}

}  // namespace scenarios

}  // namespace frenetk

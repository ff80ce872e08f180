#pragma once

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "frenetk/io/config.hpp"
#include "frenetk/io/svg.hpp"
#include "frenetk/io/trace_io.hpp"
#include "frenetk/planner.hpp"

namespace frenetk::io {

struct RunResult {
    int exit_code = 0;
    std::vector<PlanTrace> traces;
    std::vector<ModeSummary> summaries;
};

/// Runs the configured mode(s) and writes trace.csv, trace.json,
/// summary.json and optional frames under config.output_dir. Exit code 0
/// means every mode reached the goal; 2 means planning failed; 3 means an
/// output could not be written.
inline RunResult run(const RunConfig& config, std::ostream& log) {
    RunResult result;
    std::vector<bool> modes;
    if (config.mode != RunMode::repaired) modes.push_back(false);
    if (config.mode != RunMode::baseline) modes.push_back(true);

    const SimulationSetup setup = prepare(config.scenario);
    for (bool repair : modes) {
        const auto t0 = std::chrono::steady_clock::now();
        PlanTrace trace = run_simulation_recorded(config.scenario, repair);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        result.summaries.push_back(summarize(trace, ms));
        if (trace.failed_tick) {
            log << config.scenario.name << " [" << mode_name(trace) << "]: " << trace.failure << '\n';
        } else if (!trace.goal_reached) {
            log << config.scenario.name << " [" << mode_name(trace) << "]: goal not reached within the tick limit\n";
        }
        result.traces.push_back(std::move(trace));
    }

    std::vector<const PlanTrace*> ptrs;
    for (const auto& t : result.traces) ptrs.push_back(&t);
    try {
        std::error_code ec;
        std::filesystem::create_directories(config.output_dir, ec);
        if (ec) throw OutputError("cannot create '" + config.output_dir.string() + "': " + ec.message());
        if (config.emit.trace_csv) write_csv_file(config.output_dir / "trace.csv", ptrs);
        if (config.emit.trace_json) write_json_file(config.output_dir / "trace.json", traces_json(ptrs));
        if (config.emit.svg_frames) {
            for (const auto& t : result.traces) {
                auto dir = config.output_dir / "frames";
                if (result.traces.size() > 1) dir /= mode_name(t);
                write_frames(dir, config.scenario, setup.polyline, t);
            }
        }
        write_json_file(config.output_dir / "summary.json",
                        summary_document(config.scenario.name, config.scenario.planner.base_seed, result.summaries));
    } catch (const OutputError& e) {
        log << "output error: " << e.what() << '\n';
        result.exit_code = 3;
        return result;
    }

    for (const auto& t : result.traces) {
        if (t.failed_tick) result.exit_code = 2;
        else if (!t.goal_reached && result.exit_code == 0) result.exit_code = 1;
    }
    return result;
}

}  // namespace frenetk::io

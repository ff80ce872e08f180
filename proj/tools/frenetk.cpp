#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "frenetk/io/config.hpp"
#include "frenetk/io/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Frenet-frame planning simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a scenario and write traces");
    std::string config_path;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool svg = false;
    run->add_option("--config", config_path, "config file, or a bundled scenario name")->required();
    run->add_option("--mode", mode, "baseline, repaired or both");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--out", out, "output directory");
    run->add_flag("--svg", svg, "write one SVG frame per tick");

    CLI11_PARSE(app, argc, argv);

    std::optional<frenetk::io::RunConfig> parsed;
    try {
        parsed = frenetk::io::parse_config(config_path);
        auto& cfg = *parsed;
        if (mode) cfg.mode = frenetk::io::parse_mode(*mode, "--mode");
        if (seed) cfg.scenario.planner.base_seed = *seed;
        if (out) cfg.output_dir = *out;
        if (svg) cfg.emit.svg_frames = true;
    } catch (const frenetk::io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 64;
    }
    const auto& cfg = *parsed;

    const auto result = frenetk::io::run(cfg, std::cerr);
    for (const auto& s : result.summaries) {
        std::cout << cfg.scenario.name << " [" << s.mode << "] ticks=" << s.ticks
                  << " goal=" << (s.goal_reached ? "reached" : "missed") << " anomalous_selected=" << s.anomalous_selected
                  << " anomalous_candidates=" << s.anomalous_candidates << '\n';
    }
    return result.exit_code;
}

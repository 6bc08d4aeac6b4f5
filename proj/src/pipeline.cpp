#include "nonstat/pipeline.hpp"

#include "nonstat/csv.hpp"
#include "nonstat/error.hpp"
#include "nonstat/log.hpp"
#include "nonstat/parallel.hpp"
#include "nonstat/random.hpp"
#include "nonstat/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace nonstat {

std::vector<std::string> SimulationBundle::method_tags() const {
    std::vector<std::string> tags;
    for (const auto& p : plans) tags.push_back(p.tag());
    return tags;
}

std::uint64_t simulation_seed(std::uint64_t master_seed, std::size_t simulation, std::size_t segment) {
    return derive_seed(master_seed, simulation + 1, segment);
}

SimulationBundle simulate_wind(const MultivariateSeries& w, double alpha, Index n_sims, std::uint64_t master_seed,
                               const PipelineConfig& cfg) {
    if (n_sims < 1) throw ConfigError("number of simulations must be at least 1");
    SimulationBundle bundle{decompose(w, cfg.loess, cfg.period), {}, {}, {}, alpha, master_seed, cfg};
    const MultivariateSeries& residual = bundle.decomposition.residual;

    const Index window = cfg.window.value_or(default_window(w.length()));
    bundle.config.window = window;
    DetectorOptions detector = cfg.detector;
    detector.seed = master_seed;
    bundle.config.detector.seed = master_seed;
    bundle.change_points = detect_changepoints(residual, alpha, window, detector);

    for (const Segment& seg : segment(residual, bundle.change_points)) {
        if (seg.length() < 20) {
            warn("segment (" + std::to_string(seg.lo) + ", " + std::to_string(seg.hi) +
                 "] has fewer than 20 rows; resampling rows independently");
            bundle.plans.push_back(plan_short_segment(seg.data()));
        } else {
            bundle.plans.push_back(plan_segment(seg.data(), cfg.segment));
        }
    }

    const Eigen::MatrixXd base = bundle.decomposition.trend.values() + bundle.decomposition.seasonal.values();
    std::vector<Eigen::MatrixXd> draws(static_cast<std::size_t>(n_sims));
    parallel_for(draws.size(), [&](std::size_t i) {
        Eigen::MatrixXd sim(w.length(), w.dimension());
        Index row = 0;
        for (std::size_t k = 0; k < bundle.plans.size(); ++k) {
            const Index len = bundle.plans[k].length();
            sim.middleRows(row, len) = draw_segment(bundle.plans[k], simulation_seed(master_seed, i, k));
            row += len;
        }
        draws[i] = sim + base;
    });
    bundle.simulations.reserve(draws.size());
    for (auto& d : draws) bundle.simulations.push_back(w.with_values(std::move(d)));
    return bundle;
}

void write_bundle(const SimulationBundle& bundle, const std::string& directory) {
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    fs::create_directories(dir);
    write_csv_file((dir / "original_trend.csv").string(), bundle.decomposition.trend);
    write_csv_file((dir / "original_seasonal.csv").string(), bundle.decomposition.seasonal);
    write_csv_file((dir / "original_residual.csv").string(), bundle.decomposition.residual);
    write_json_file((dir / "changepoints.json").string(), to_json(bundle.change_points));
    for (std::size_t i = 0; i < bundle.simulations.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sim_%04zu.csv", i + 1);
        write_csv_file((dir / name).string(), bundle.simulations[i]);
    }
    write_json_file((dir / "manifest.json").string(), manifest_json(bundle));
}

}  // namespace nonstat

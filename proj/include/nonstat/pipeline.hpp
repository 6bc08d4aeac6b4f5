#pragma once

#include "nonstat/changepoint.hpp"
#include "nonstat/decompose.hpp"
#include "nonstat/segment_sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nonstat {

struct PipelineConfig {
    LoessConfig loess{};
    std::optional<Index> period;
    /// Spectral window N; default_window(T) when unset.
    std::optional<Index> window;
    /// Detector settings; its seed is replaced by the master seed.
    DetectorOptions detector{};
    SegmentSimConfig segment{};
};

struct SimulationBundle {
    Decomposition decomposition;
    ChangePointResult change_points;
    std::vector<SegmentPlan> plans;  ///< one per segment, shared by every simulation
    std::vector<MultivariateSeries> simulations;
    double alpha = 0.0;
    std::uint64_t master_seed = 0;
    PipelineConfig config;

    std::vector<std::string> method_tags() const;
};

/// Seed of segment k in simulation i.
std::uint64_t simulation_seed(std::uint64_t master_seed, std::size_t simulation, std::size_t segment);

/// Decompose, detect change points on the residual at level alpha, plan each
/// segment, then for every simulation draw all segments, append them and add
/// back the original trend and seasonal terms. Simulations run concurrently.
SimulationBundle simulate_wind(const MultivariateSeries& w, double alpha, Index n_sims, std::uint64_t master_seed,
                               const PipelineConfig& cfg = {});

/// Writes original_{trend,seasonal,residual}.csv, changepoints.json,
/// sim_0001.csv ... and manifest.json into `directory` (created if missing).
void write_bundle(const SimulationBundle& bundle, const std::string& directory);

}  // namespace nonstat

#pragma once

#include "nonstat/var_model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace nonstat {

struct SegmentSimConfig {
    /// Orders below this use the fitted VAR; the rest fall back to the block bootstrap.
    int parametric_cutoff = 5;
    /// Maximum VAR order searched; default_max_order(n, L) when unset.
    std::optional<int> max_order;
    OrderCriterion criterion = OrderCriterion::AIC;
};

enum class SimMethod { Var, Bootstrap };

/// Everything needed to draw simulations of one stationary segment.
struct SegmentPlan {
    Eigen::MatrixXd source;
    SimMethod method = SimMethod::Bootstrap;
    int order = 0;           ///< selected VAR order, -1 when selection was impossible
    Index block_length = 0;  ///< bootstrap branch only
    std::optional<VarModel> model;

    Index length() const noexcept { return source.rows(); }
    /// "var(p)" or "bootstrap(b)".
    std::string tag() const;
};

struct SegmentSimulation {
    Eigen::MatrixXd data;
    SegmentPlan plan;
};

/// Selects the VAR order; order < cutoff keeps the fitted VAR, otherwise the
/// segment is resampled by moving-block bootstrap with the automatic block
/// length. Degenerate or unstable fits also take the bootstrap branch.
/// Errors: InsufficientData below 20 rows.
SegmentPlan plan_segment(const Eigen::Ref<const Eigen::MatrixXd>& segment, const SegmentSimConfig& cfg = {});

/// I.i.d. row resampling (block length 1) for segments too short to model.
SegmentPlan plan_short_segment(const Eigen::Ref<const Eigen::MatrixXd>& segment);

/// One realization with the segment's shape; deterministic in seed.
Eigen::MatrixXd draw_segment(const SegmentPlan& plan, std::uint64_t seed);

/// plan_segment followed by draw_segment.
SegmentSimulation simulate_segment(const Eigen::Ref<const Eigen::MatrixXd>& segment, std::uint64_t seed,
                                   const SegmentSimConfig& cfg = {});

}  // namespace nonstat

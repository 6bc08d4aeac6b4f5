#pragma once

#include "nonstat/series.hpp"

#include <optional>

namespace nonstat {

/// Local regression settings. `span` is the fraction of the series used by
/// each local fit; the window always holds ceil(span * T) consecutive points
/// and shifts inward at the series ends.
struct LoessConfig {
    double span = 0.25;
    int degree = 2;
    int robustness_iters = 0;
};

/// w = trend + seasonal + residual, with the residual defined by subtraction.
struct Decomposition {
    MultivariateSeries trend;
    MultivariateSeries seasonal;
    MultivariateSeries residual;
};

/// Loess smooth of one column. Tricube distance weights; optional bisquare
/// robustness passes.
Eigen::VectorXd loess_smooth(const Eigen::Ref<const Eigen::VectorXd>& y, const LoessConfig& cfg);

/// Per-component loess trend. Errors: ConfigError when the window cannot hold
/// degree + 2 points or the config is out of range.
MultivariateSeries loess_trend(const MultivariateSeries& s, const LoessConfig& cfg);

/// Phase-wise means (phase = row mod period), centered to sum to zero over one
/// period and tiled to the series length. Errors: ConfigError for period <= 1.
MultivariateSeries seasonal_periodic_mean(const MultivariateSeries& s, Index period);

/// Trend by loess, seasonal by periodic means of the detrended series when a
/// period is given (zero otherwise), residual = w - trend - seasonal.
Decomposition decompose(const MultivariateSeries& s, const LoessConfig& cfg = {},
                        std::optional<Index> period = std::nullopt);

}  // namespace nonstat

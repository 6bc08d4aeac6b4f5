#pragma once

#include "nonstat/series.hpp"
#include "nonstat/spectral.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nonstat {

struct DetectorOptions {
    SpectralConfig spectral{};
    Index n_boot = 200;
    std::uint64_t seed = 0;
    /// Exclusion radius around an accepted point; defaults to the window N.
    std::optional<Index> min_separation;
};

/// Sorted bootstrap maxima of the deviation profile under the null of no change.
struct NullDistribution {
    std::vector<double> maxima;
    double mean_block = 1.0;  ///< expected stationary-bootstrap block length

    /// Empirical quantile with linear interpolation between order statistics.
    double quantile(double p) const;
};

struct ChangePointResult {
    std::vector<Index> change_points;  ///< strictly increasing, 1-based
    std::vector<double> statistics;    ///< D-hat at each change point, same order
    std::vector<double> round_thresholds;
    double threshold = 0.0;
    double alpha = 0.0;
    Index window = 0;
    Index n_boot = 0;
    double bootstrap_block = 1.0;
    std::uint64_t seed = 0;
    DeviationProfile profile;
};

/// Rows (lo, hi] of a series; `lo` is the preceding change point (0 for the first segment).
struct Segment {
    Index lo = 0;
    Index hi = 0;
    const Eigen::MatrixXd* source = nullptr;

    Index length() const noexcept { return hi - lo; }
    auto data() const { return source->middleRows(lo, hi - lo); }
};

/// Max-statistic null distribution from `n_boot` stationary-bootstrap
/// resamples of the whole series. Replicate b uses the stream (seed, b).
NullDistribution null_distribution(const Eigen::Ref<const Eigen::MatrixXd>& x, Index window,
                                   const SpectralConfig& cfg, Index n_boot, std::uint64_t seed);

/// (1 - alpha) quantile of null_distribution. Errors: ConfigError for
/// alpha outside (0, 1) or n_boot < 100; WindowError for short series.
double null_threshold(const MultivariateSeries& r, double alpha, Index window, Index n_boot, std::uint64_t seed,
                      const SpectralConfig& cfg = {});

/// Sequential detection: take the largest remaining D-hat, accept it while it
/// exceeds the bootstrap threshold, mask [tau - sep, tau + sep], repeat.
/// Candidates are the interior points N < tau < T - N.
ChangePointResult detect_changepoints(const MultivariateSeries& r, double alpha, Index window,
                                      const DetectorOptions& opts = {});

/// Detection against an already computed null distribution; the profile is
/// recomputed. Used when scanning several significance levels.
ChangePointResult detect_with_null(const MultivariateSeries& r, double alpha, Index window,
                                   const NullDistribution& null, const DetectorOptions& opts = {});

/// M + 1 segments tiling (0, T].
std::vector<Segment> segment(const MultivariateSeries& r, const std::vector<Index>& change_points);
std::vector<Segment> segment(const MultivariateSeries& r, const ChangePointResult& cps);

}  // namespace nonstat

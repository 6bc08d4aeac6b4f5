#include "nonstat/changepoint.hpp"

#include "nonstat/bootstrap.hpp"
#include "nonstat/error.hpp"
#include "nonstat/parallel.hpp"
#include "nonstat/random.hpp"

#include <algorithm>
#include <cmath>

namespace nonstat {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

void check_length(Index length, Index window) {
    if (window < 2) throw WindowError("window must be at least 2");
    if (length < 2 * window + 1) {
        throw WindowError("series of length " + std::to_string(length) + " is too short for window " +
                          std::to_string(window) + " (needs 2N + 1)");
    }
}

}  // namespace

double NullDistribution::quantile(double p) const {
    if (maxima.empty()) throw StateError("empty null distribution");
    const double h = (static_cast<double>(maxima.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, maxima.size() - 1);
    return maxima[lo] + (h - static_cast<double>(lo)) * (maxima[hi] - maxima[lo]);
}

NullDistribution null_distribution(const Eigen::Ref<const Eigen::MatrixXd>& x, Index window,
                                   const SpectralConfig& cfg, Index n_boot, std::uint64_t seed) {
    check_length(x.rows(), window);
    if (n_boot < 100) throw ConfigError("at least 100 bootstrap replicates are required");
    NullDistribution null;
    double sum = 0.0;
    for (Index j = 0; j < x.cols(); ++j) sum += univariate_block_length(x.col(j), BlockScheme::Stationary);
    null.mean_block = sum / static_cast<double>(x.cols());

    null.maxima.assign(static_cast<std::size_t>(n_boot), 0.0);
    const Eigen::MatrixXd source = x;
    parallel_for(static_cast<std::size_t>(n_boot), [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        const Eigen::MatrixXd resample = stationary_bootstrap(source, null.mean_block, source.rows(), rng);
        null.maxima[b] = detail::profile_values(resample, window, cfg, false).maxCoeff();
    });
    std::sort(null.maxima.begin(), null.maxima.end());
    return null;
}

double null_threshold(const MultivariateSeries& r, double alpha, Index window, Index n_boot, std::uint64_t seed,
                      const SpectralConfig& cfg) {
    check_alpha(alpha);
    return null_distribution(r.values(), window, cfg, n_boot, seed).quantile(1.0 - alpha);
}

ChangePointResult detect_with_null(const MultivariateSeries& r, double alpha, Index window,
                                   const NullDistribution& null, const DetectorOptions& opts) {
    check_alpha(alpha);
    check_length(r.length(), window);
    ChangePointResult result;
    result.alpha = alpha;
    result.window = window;
    result.seed = opts.seed;
    result.n_boot = static_cast<Index>(null.maxima.size());
    result.bootstrap_block = null.mean_block;
    result.threshold = null.quantile(1.0 - alpha);
    result.profile = deviation_profile(r, window, opts.spectral);

    const Index separation = opts.min_separation.value_or(window);
    const auto& d = result.profile.d_hat;
    const Index count = d.size();
    std::vector<bool> masked(static_cast<std::size_t>(count), false);
    // Profile endpoints tau = N and tau = T - N are never candidates.
    masked.front() = true;
    masked.back() = true;

    std::vector<std::pair<Index, double>> accepted;
    for (;;) {
        Index best = -1;
        for (Index i = 0; i < count; ++i) {
            if (!masked[static_cast<std::size_t>(i)] && (best < 0 || d(i) > d(best))) best = i;
        }
        if (best < 0) break;
        result.round_thresholds.push_back(result.threshold);
        if (!(d(best) > result.threshold)) break;
        accepted.emplace_back(result.profile.tau_values[static_cast<std::size_t>(best)], d(best));
        const Index lo = std::max<Index>(0, best - separation);
        const Index hi = std::min<Index>(count - 1, best + separation);
        for (Index i = lo; i <= hi; ++i) masked[static_cast<std::size_t>(i)] = true;
    }
    std::sort(accepted.begin(), accepted.end());
    for (const auto& [tau, stat] : accepted) {
        result.change_points.push_back(tau);
        result.statistics.push_back(stat);
    }
    return result;
}

ChangePointResult detect_changepoints(const MultivariateSeries& r, double alpha, Index window,
                                      const DetectorOptions& opts) {
    check_alpha(alpha);
    check_length(r.length(), window);
    const NullDistribution null = null_distribution(r.values(), window, opts.spectral, opts.n_boot, opts.seed);
    return detect_with_null(r, alpha, window, null, opts);
}

std::vector<Segment> segment(const MultivariateSeries& r, const std::vector<Index>& change_points) {
    std::vector<Segment> segments;
    Index lo = 0;
    for (Index tau : change_points) {
        if (tau <= lo || tau >= r.length()) throw ConfigError("change points must be increasing inside (0, T)");
        segments.push_back(Segment{lo, tau, &r.values()});
        lo = tau;
    }
    segments.push_back(Segment{lo, r.length(), &r.values()});
    return segments;
}

std::vector<Segment> segment(const MultivariateSeries& r, const ChangePointResult& cps) {
    return segment(r, cps.change_points);
}

}  // namespace nonstat

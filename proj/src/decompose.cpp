#include "nonstat/decompose.hpp"

#include "nonstat/error.hpp"
#include "nonstat/log.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nonstat {

namespace {

Index window_size(Index n, const LoessConfig& cfg) {
    if (!(cfg.span > 0.0 && cfg.span <= 1.0)) throw ConfigError("loess span must lie in (0, 1]");
    if (cfg.degree != 1 && cfg.degree != 2) throw ConfigError("loess degree must be 1 or 2");
    if (cfg.robustness_iters < 0) throw ConfigError("robustness iterations must be non-negative");
    const auto q = std::min<Index>(n, static_cast<Index>(std::ceil(cfg.span * static_cast<double>(n) - 1e-9)));
    if (q < cfg.degree + 2) {
        throw ConfigError("loess window of " + std::to_string(q) + " points is too small for degree " +
                          std::to_string(cfg.degree));
    }
    return q;
}

double tricube(double u) {
    const double a = 1.0 - u * u * u;
    return u < 1.0 ? a * a * a : 0.0;
}

double bisquare(double u) {
    const double a = 1.0 - u * u;
    return u < 1.0 ? a * a : 0.0;
}

// One pass of local polynomial fits at every index with the given robustness weights.
Eigen::VectorXd local_fits(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::VectorXd& robust,
                           Index q, int degree) {
    const Index n = y.size();
    const Index half = (q - 1) / 2;
    Eigen::VectorXd fitted(n);
    const int p = degree + 1;
    for (Index t = 0; t < n; ++t) {
        Index lo = std::clamp<Index>(t - half, 0, n - q);
        const Index hi = lo + q - 1;
        // Bandwidth one step past the farthest window point keeps every window point weighted.
        const double h = static_cast<double>(std::max(t - lo, hi - t)) + 1.0;
        Eigen::MatrixXd xtwx = Eigen::MatrixXd::Zero(p, p);
        Eigen::VectorXd xtwy = Eigen::VectorXd::Zero(p);
        for (Index s = lo; s <= hi; ++s) {
            const double u = static_cast<double>(s - t) / h;
            const double w = tricube(std::abs(u)) * robust(s);
            if (w <= 0.0) continue;
            double basis[3] = {1.0, u, u * u};
            for (int a = 0; a < p; ++a) {
                xtwy(a) += w * basis[a] * y(s);
                for (int b = 0; b < p; ++b) xtwx(a, b) += w * basis[a] * basis[b];
            }
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtwx);
        if (qr.rank() < p) {
            // Robustness weights can zero out too many points; fall back to the local mean.
            const double wsum = xtwx(0, 0);
            fitted(t) = wsum > 0.0 ? xtwy(0) / wsum : y(t);
            continue;
        }
        fitted(t) = qr.solve(xtwy)(0);
    }
    return fitted;
}

double median(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
    }
    return m;
}

}  // namespace

Eigen::VectorXd loess_smooth(const Eigen::Ref<const Eigen::VectorXd>& y, const LoessConfig& cfg) {
    const Index n = y.size();
    const Index q = window_size(n, cfg);
    Eigen::VectorXd robust = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd fitted = local_fits(y, robust, q, cfg.degree);
    for (int iter = 0; iter < cfg.robustness_iters; ++iter) {
        const Eigen::VectorXd residual = y - fitted;
        std::vector<double> abs_res(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) abs_res[static_cast<std::size_t>(i)] = std::abs(residual(i));
        const double scale = 6.0 * median(abs_res);
        if (scale <= 0.0) break;
        for (Index i = 0; i < n; ++i) robust(i) = bisquare(std::abs(residual(i)) / scale);
        fitted = local_fits(y, robust, q, cfg.degree);
    }
    return fitted;
}

MultivariateSeries loess_trend(const MultivariateSeries& s, const LoessConfig& cfg) {
    const auto& x = s.values();
    Eigen::MatrixXd trend(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) trend.col(j) = loess_smooth(x.col(j), cfg);
    return s.with_values(std::move(trend));
}

MultivariateSeries seasonal_periodic_mean(const MultivariateSeries& s, Index period) {
    if (period <= 1) throw ConfigError("seasonal period must be at least 2");
    const auto& x = s.values();
    const Index n = x.rows();
    if (n < 2 * period) {
        warn("seasonal estimate from fewer than two full periods (" + std::to_string(n) + " rows, period " +
             std::to_string(period) + ")");
    }
    Eigen::MatrixXd phase_mean = Eigen::MatrixXd::Zero(period, x.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(period);
    for (Index t = 0; t < n; ++t) {
        phase_mean.row(t % period) += x.row(t);
        counts(t % period) += 1.0;
    }
    for (Index k = 0; k < period; ++k) {
        if (counts(k) > 0.0) phase_mean.row(k) /= counts(k);
    }
    phase_mean.rowwise() -= phase_mean.colwise().mean();
    Eigen::MatrixXd seasonal(n, x.cols());
    for (Index t = 0; t < n; ++t) seasonal.row(t) = phase_mean.row(t % period);
    return s.with_values(std::move(seasonal));
}

Decomposition decompose(const MultivariateSeries& s, const LoessConfig& cfg, std::optional<Index> period) {
    MultivariateSeries trend = loess_trend(s, cfg);
    MultivariateSeries detrended = s.with_values(s.values() - trend.values());
    MultivariateSeries seasonal = period ? seasonal_periodic_mean(detrended, *period)
                                         : s.with_values(Eigen::MatrixXd::Zero(s.length(), s.dimension()));
    MultivariateSeries residual = s.with_values(s.values() - trend.values() - seasonal.values());
    return Decomposition{std::move(trend), std::move(seasonal), std::move(residual)};
}

}  // namespace nonstat

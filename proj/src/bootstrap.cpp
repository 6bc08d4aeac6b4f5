#include "nonstat/bootstrap.hpp"

#include "nonstat/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nonstat {

namespace {

double flat_top(double s) {
    const double a = std::abs(s);
    if (a < 0.5) return 1.0;
    if (a <= 1.0) return 2.0 * (1.0 - a);
    return 0.0;
}

}  // namespace

double univariate_block_length(const Eigen::Ref<const Eigen::VectorXd>& x, BlockScheme scheme) {
    const Index n = x.size();
    const double nd = static_cast<double>(n);
    const Eigen::VectorXd c = x.array() - x.mean();
    const double gamma0 = c.squaredNorm() / nd;
    const double b_max = std::max(1.0, std::ceil(std::min(3.0 * std::sqrt(nd), nd / 3.0)));
    if (!(gamma0 > 0.0)) return 1.0;

    const Index kn = std::max<Index>(5, static_cast<Index>(std::ceil(std::sqrt(std::log10(nd)))));
    const Index m_max = std::min<Index>(n - 1, static_cast<Index>(std::ceil(std::sqrt(nd))) + kn);
    auto autocov = [&](Index k) { return c.head(n - k).dot(c.tail(n - k)) / nd; };

    std::vector<double> rho(static_cast<std::size_t>(m_max + 1));
    for (Index k = 1; k <= m_max; ++k) rho[static_cast<std::size_t>(k)] = autocov(k) / gamma0;
    const double critical = 2.0 * std::sqrt(std::log10(nd) / nd);

    // Smallest m after which kn consecutive autocorrelations are insignificant.
    Index m_hat = -1;
    for (Index m = 0; m + kn <= m_max; ++m) {
        bool quiet = true;
        for (Index k = 1; k <= kn && quiet; ++k) quiet = std::abs(rho[static_cast<std::size_t>(m + k)]) < critical;
        if (quiet) {
            m_hat = m;
            break;
        }
    }
    if (m_hat < 0) {
        m_hat = 1;
        for (Index k = 1; k <= m_max; ++k) {
            if (std::abs(rho[static_cast<std::size_t>(k)]) > critical) m_hat = k;
        }
    }
    const Index big_m = std::min(2 * m_hat, m_max);
    if (big_m == 0) return 1.0;

    double g_hat = 0.0;
    double spectrum0 = gamma0;
    for (Index k = 1; k <= big_m; ++k) {
        const double w = flat_top(static_cast<double>(k) / static_cast<double>(big_m));
        const double r = autocov(k);
        g_hat += 2.0 * w * static_cast<double>(k) * r;
        spectrum0 += 2.0 * w * r;
    }
    const double d_const = scheme == BlockScheme::Stationary ? 2.0 : 4.0 / 3.0;
    const double d_hat = d_const * spectrum0 * spectrum0;
    if (!(d_hat > 0.0)) return 1.0;
    const double b = std::cbrt(2.0 * g_hat * g_hat / d_hat) * std::cbrt(nd);
    return std::clamp(b, 1.0, b_max);
}

Index block_length(const Eigen::Ref<const Eigen::MatrixXd>& segment, BlockScheme scheme) {
    const Index n = segment.rows();
    if (n < 20) throw InsufficientData("block length selection needs at least 20 rows, got " + std::to_string(n));
    double sum = 0.0;
    for (Index j = 0; j < segment.cols(); ++j) sum += univariate_block_length(segment.col(j), scheme);
    const double mean = sum / static_cast<double>(segment.cols());
    const auto rounded = static_cast<Index>(std::floor(mean + 0.5));
    return std::clamp<Index>(rounded, 1, std::max<Index>(1, n / 3));
}

BootstrapSampler::BootstrapSampler(Eigen::MatrixXd source, Index block_length)
    : source_(std::move(source)), block_length_(block_length) {
    if (source_.rows() < 1) throw ConfigError("bootstrap source is empty");
    if (block_length_ < 1 || block_length_ > source_.rows()) {
        throw ConfigError("block length " + std::to_string(block_length_) + " outside [1, " +
                          std::to_string(source_.rows()) + "]");
    }
}

Eigen::MatrixXd block_bootstrap(const BootstrapSampler& sampler, Index length, std::uint64_t seed) {
    const auto& src = sampler.source();
    const Index n = src.rows();
    const Index b = sampler.block_length();
    Rng rng(seed);
    Eigen::MatrixXd out(length, src.cols());
    for (Index filled = 0; filled < length;) {
        const auto start = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - b + 1)));
        const Index take = std::min(b, length - filled);
        out.middleRows(filled, take) = src.middleRows(start, take);
        filled += take;
    }
    return out;
}

Eigen::MatrixXd stationary_bootstrap(const Eigen::Ref<const Eigen::MatrixXd>& source, double mean_block,
                                     Index length, Rng& rng) {
    const Index n = source.rows();
    const double restart = 1.0 / std::max(1.0, mean_block);
    Eigen::MatrixXd out(length, source.cols());
    auto pos = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    for (Index t = 0; t < length; ++t) {
        if (t > 0) {
            pos = rng.uniform() < restart ? static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))
                                          : (pos + 1) % n;
        }
        out.row(t) = source.row(pos);
    }
    return out;
}

}  // namespace nonstat

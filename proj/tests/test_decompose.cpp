#include <doctest.h>

#include "nonstat/decompose.hpp"
#include "nonstat/error.hpp"
#include "nonstat/log.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace nonstat;

namespace {

// Weighted least squares at each point, written from the definition: the q
// nearest consecutive points, tricube weights on distance / (max distance + 1),
// polynomial in the raw time offset, solved through the normal equations.
Eigen::VectorXd wls_oracle(const Eigen::VectorXd& y, double span, int degree) {
    const Index n = y.size();
    const auto q = static_cast<Index>(std::ceil(span * static_cast<double>(n) - 1e-9));
    Eigen::VectorXd out(n);
    for (Index t = 0; t < n; ++t) {
        Index lo = t - (q - 1) / 2;
        if (lo < 0) lo = 0;
        if (lo + q > n) lo = n - q;
        const Index hi = lo + q - 1;
        const double h = std::max(t - lo, hi - t) + 1.0;
        Eigen::MatrixXd x(q, degree + 1);
        Eigen::VectorXd w(q), target(q);
        for (Index s = lo; s <= hi; ++s) {
            const double d = static_cast<double>(s - t);
            const double u = std::abs(d) / h;
            w(s - lo) = std::pow(1.0 - u * u * u, 3);
            target(s - lo) = y(s);
            for (int k = 0; k <= degree; ++k) x(s - lo, k) = std::pow(d, k);
        }
        const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
        out(t) = (xtw * x).ldlt().solve(xtw * target)(0);
    }
    return out;
}

}  // namespace

TEST_CASE("loess matches the weighted least squares oracle") {
    const Eigen::VectorXd y = support::white_noise(97, 1, 8).col(0);
    for (int degree : {1, 2}) {
        for (double span : {0.1, 0.25, 0.6, 1.0}) {
            const Eigen::VectorXd fast = loess_smooth(y, {span, degree, 0});
            const Eigen::VectorXd oracle = wls_oracle(y, span, degree);
            CHECK((fast - oracle).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("loess reproduces constants, lines and quadratics") {
    const Index n = 150;
    Eigen::MatrixXd x(n, 3);
    for (Index t = 0; t < n; ++t) {
        const double s = static_cast<double>(t + 1);
        x(t, 0) = 4.25;
        x(t, 1) = 2.0 * s + 1.0;
        x(t, 2) = 0.01 * s * s - 0.7 * s + 3.0;
    }
    const MultivariateSeries w(x);
    for (double span : {0.05, 0.25, 0.5, 1.0}) {
        const auto linear = loess_trend(w, {span, 1, 0});
        CHECK((linear.values().col(0).array() - 4.25).abs().maxCoeff() < 1e-8);
        CHECK((linear.values().col(1) - x.col(1)).cwiseAbs().maxCoeff() < 1e-8);
        const auto quad = loess_trend(w, {span, 2, 0});
        CHECK((quad.values() - x).cwiseAbs().maxCoeff() < 1e-8);
        // Re-smoothing a reproduced polynomial leaves it unchanged.
        const auto again = loess_trend(quad, {span, 2, 0});
        CHECK((again.values() - x).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("robustness passes downweight an outlier") {
    Eigen::VectorXd y(80);
    for (Index t = 0; t < 80; ++t) y(t) = 0.1 * static_cast<double>(t) + 0.05 * std::sin(static_cast<double>(t));
    y(40) += 50.0;
    const Eigen::VectorXd plain = loess_smooth(y, {0.3, 1, 0});
    const Eigen::VectorXd robust = loess_smooth(y, {0.3, 1, 3});
    CHECK(std::abs(robust(40) - 4.0) < 0.2);
    CHECK(std::abs(plain(40) - 4.0) > 1.0);
}

TEST_CASE("loess configuration errors") {
    const MultivariateSeries w(support::white_noise(20, 1, 1));
    CHECK_THROWS_AS(loess_trend(w, {0.1, 2, 0}), ConfigError);
    CHECK_THROWS_AS(loess_trend(w, {0.0, 1, 0}), ConfigError);
    CHECK_THROWS_AS(loess_trend(w, {1.5, 1, 0}), ConfigError);
    CHECK_THROWS_AS(loess_trend(w, {0.5, 3, 0}), ConfigError);
    CHECK_THROWS_AS(loess_trend(w, {0.5, 1, -1}), ConfigError);
    CHECK_NOTHROW(loess_trend(w, {0.2, 2, 0}));
}

TEST_CASE("periodic mean recovers a sinusoid") {
    Eigen::MatrixXd x(240, 1);
    for (Index t = 0; t < 240; ++t) x(t, 0) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t + 1) / 12.0 + 0.3);
    const MultivariateSeries w(x);
    const auto s = seasonal_periodic_mean(w, 12);
    CHECK((s.values() - x).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(seasonal_periodic_mean(MultivariateSeries(Eigen::MatrixXd::Zero(30, 2)), 5).values().isZero(0.0));
}

TEST_CASE("periodic mean is periodic and centered") {
    const Eigen::MatrixXd x = support::white_noise(203, 2, 77) * 3.0;
    const auto s = seasonal_periodic_mean(MultivariateSeries(x), 7).values();
    for (Index t = 7; t < 203; ++t) CHECK((s.row(t) - s.row(t - 7)).isZero(0.0));
    for (Index c = 0; c < 2; ++c) CHECK(std::abs(s.col(c).head(7).sum()) <= 1e-9 * 7 * 3.0);
}

TEST_CASE("periodic mean of white noise stays within its standard error") {
    const double sigma = 1.0;
    int within = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = seasonal_periodic_mean(MultivariateSeries(support::white_noise(2400, 1, seed)), 12);
        within += s.values().cwiseAbs().maxCoeff() <= 4.0 * sigma / std::sqrt(2400.0 / 12.0);
    }
    CHECK(within == 20);
}

TEST_CASE("periodic mean errors and short-series warning") {
    const MultivariateSeries w(support::white_noise(30, 1, 2));
    CHECK_THROWS_AS(seasonal_periodic_mean(w, 1), ConfigError);
    int warnings = 0;
    auto previous = set_warning_sink([&](const std::string&) { ++warnings; });
    seasonal_periodic_mean(w, 20);
    set_warning_sink(previous);
    CHECK(warnings == 1);
}

TEST_CASE("decomposition identity is exact") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Eigen::MatrixXd x = support::white_noise(120, 3, seed) * 5.0 + Eigen::MatrixXd::Constant(120, 3, 7.0);
        const MultivariateSeries w(x, {"a", "b", "c"});
        for (auto period : {std::optional<Index>{}, std::optional<Index>{12}}) {
            const auto d = decompose(w, {}, period);
            const Eigen::MatrixXd rebuilt = x - d.trend.values() - d.seasonal.values() - d.residual.values();
            CHECK(rebuilt.isZero(0.0));
            CHECK(d.residual.names() == w.names());
            if (!period) CHECK(d.seasonal.values().isZero(0.0));
        }
    }
}

#pragma once

#include "nonstat/random.hpp"
#include "nonstat/series.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace support {

using nonstat::Index;

inline double gauss(nonstat::Rng& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Eigen::MatrixXd white_noise(Index rows, Index cols, std::uint64_t seed, double sd = 1.0) {
    nonstat::Rng rng(seed);
    Eigen::MatrixXd x(rows, cols);
    for (Index t = 0; t < rows; ++t)
        for (Index c = 0; c < cols; ++c) x(t, c) = sd * gauss(rng);
    return x;
}

inline Eigen::VectorXd ar1(Index n, double phi, std::uint64_t seed, Index burn = 200) {
    nonstat::Rng rng(seed);
    double y = 0.0;
    Eigen::VectorXd out(n);
    for (Index t = -burn; t < n; ++t) {
        y = phi * y + gauss(rng);
        if (t >= 0) out(t) = y;
    }
    return out;
}

// Stable VAR(p) driven by Gaussian noise with covariance chol * chol'.
inline Eigen::MatrixXd simulate_gaussian_var(const std::vector<Eigen::MatrixXd>& coeffs, const Eigen::MatrixXd& chol,
                                             Index n, std::uint64_t seed, Index burn = 500) {
    const Index dim = chol.rows();
    const auto p = static_cast<Index>(coeffs.size());
    nonstat::Rng rng(seed);
    Eigen::MatrixXd all = Eigen::MatrixXd::Zero(n + burn + p, dim);
    for (Index t = p; t < all.rows(); ++t) {
        Eigen::VectorXd e(dim);
        for (Index c = 0; c < dim; ++c) e(c) = gauss(rng);
        Eigen::VectorXd y = chol * e;
        for (Index i = 0; i < p; ++i) y += coeffs[static_cast<std::size_t>(i)] * all.row(t - 1 - i).transpose();
        all.row(t) = y.transpose();
    }
    return all.bottomRows(n);
}

// Bivariate white noise with unit variances and correlation rho.
inline Eigen::MatrixXd correlated_pair(Index rows, double rho, std::uint64_t seed, double sd = 1.0) {
    Eigen::MatrixXd z = white_noise(rows, 2, seed);
    Eigen::MatrixXd x(rows, 2);
    x.col(0) = sd * z.col(0);
    x.col(1) = sd * (rho * z.col(0) + std::sqrt(1.0 - rho * rho) * z.col(1));
    return x;
}

}  // namespace support

#pragma once

#include "nonstat/series.hpp"

#include <cstdint>
#include <vector>

namespace nonstat {

/// VAR(p) fitted to mean-centered data:
///   y_t = intercept + sum_i W_i y_{t-i} + psi_t,   r_t = y_t + mean.
struct VarModel {
    int order = 0;
    std::vector<Eigen::MatrixXd> coefficients;  ///< W_1 .. W_p, each L x L
    Eigen::VectorXd intercept;                  ///< ~0 since the data are centered
    Eigen::VectorXd mean;                       ///< removed before fitting, re-added on simulation
    Eigen::MatrixXd residuals;                  ///< (n - p) x L innovation sample
    Index segment_length = 0;
    double normal_equation_residual = 0.0;      ///< ||X'(Y - X B)||_max / (||X||_F ||Y||_F)

    Index dimension() const noexcept { return coefficients.empty() ? intercept.size() : coefficients.front().rows(); }
    Eigen::MatrixXd companion() const;
    double spectral_radius() const;
    bool stable() const { return order == 0 || spectral_radius() < 1.0; }
};

enum class OrderCriterion { AIC, BIC };

struct OrderSelection {
    int order = 0;
    std::vector<double> scores;  ///< criterion value for p = 0 .. p_max
};

/// Multivariate least squares with an intercept. Errors: InsufficientData
/// unless n - p > p L + 1; RankDeficient for a singular regressor matrix.
VarModel fit_var(const Eigen::Ref<const Eigen::MatrixXd>& segment, int order);

/// min(10, floor((n - 1) / (3 L))).
int default_max_order(Index rows, Index dimension);

/// Order minimizing n log det(Sigma_p) + penalty over 0 .. p_max on a common
/// estimation sample (the first p_max rows are held back for every p). Ties
/// go to the smaller order. AIC penalty is 2 (p L^2 + L).
OrderSelection select_order(const Eigen::Ref<const Eigen::MatrixXd>& segment, int max_order,
                            OrderCriterion criterion = OrderCriterion::AIC);

/// Recursion driven by innovations resampled from the stored residuals, with
/// a burn-in of 10 p discarded. Errors: UnstableModel.
Eigen::MatrixXd simulate_var(const VarModel& model, Index length, std::uint64_t seed);

}  // namespace nonstat

#include "nonstat/var_model.hpp"

#include "nonstat/error.hpp"
#include "nonstat/log.hpp"
#include "nonstat/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nonstat {

namespace {

struct LeastSquares {
    Eigen::MatrixXd coefficients;  // (1 + pL) x L
    Eigen::MatrixXd residuals;
    double normal_residual = 0.0;
};

// Regress rows [first, n) of the centered data on an intercept and p lags.
LeastSquares regress(const Eigen::MatrixXd& y, int p, Index first) {
    const Index dim = y.cols();
    const Index rows = y.rows() - first;
    const Index regressors = 1 + p * dim;
    Eigen::MatrixXd x(rows, regressors);
    x.col(0).setOnes();
    for (int lag = 1; lag <= p; ++lag) {
        x.middleCols(1 + (lag - 1) * dim, dim) = y.middleRows(first - lag, rows);
    }
    const Eigen::MatrixXd target = y.bottomRows(rows);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < regressors) {
        throw RankDeficient("VAR(" + std::to_string(p) + ") regressors are collinear (rank " +
                            std::to_string(qr.rank()) + " of " + std::to_string(regressors) + ")");
    }
    LeastSquares ls;
    ls.coefficients = qr.solve(target);
    ls.residuals = target - x * ls.coefficients;
    const double scale = x.norm() * target.norm();
    ls.normal_residual = scale > 0.0 ? (x.transpose() * ls.residuals).cwiseAbs().maxCoeff() / scale : 0.0;
    return ls;
}

}  // namespace

Eigen::MatrixXd VarModel::companion() const {
    const Index dim = dimension();
    const Index size = order * dim;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < order; ++i) c.block(0, i * dim, dim, dim) = coefficients[static_cast<std::size_t>(i)];
    if (order > 1) c.bottomLeftCorner(size - dim, size - dim).setIdentity();
    return c;
}

double VarModel::spectral_radius() const {
    if (order == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion(), false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

VarModel fit_var(const Eigen::Ref<const Eigen::MatrixXd>& segment, int order) {
    if (order < 0) throw ConfigError("VAR order must be non-negative");
    const Index n = segment.rows();
    const Index dim = segment.cols();
    if (n - order <= order * dim + 1) {
        throw InsufficientData("VAR(" + std::to_string(order) + ") needs more than " +
                               std::to_string(order * dim + 1) + " usable rows, segment has " +
                               std::to_string(n - order));
    }
    const double params = static_cast<double>(order * dim * dim + dim);
    if (static_cast<double>(n) < 3.0 * params / static_cast<double>(dim)) {
        warn("VAR(" + std::to_string(order) + ") on " + std::to_string(n) +
             " rows: few observations per parameter, estimates are unreliable");
    }
    VarModel model;
    model.order = order;
    model.segment_length = n;
    model.mean = segment.colwise().mean().transpose();
    const Eigen::MatrixXd y = segment.rowwise() - model.mean.transpose();
    const LeastSquares ls = regress(y, order, order);
    model.intercept = ls.coefficients.row(0).transpose();
    for (int i = 0; i < order; ++i) {
        model.coefficients.push_back(ls.coefficients.middleRows(1 + i * dim, dim).transpose());
    }
    model.residuals = ls.residuals;
    model.normal_equation_residual = ls.normal_residual;
    return model;
}

int default_max_order(Index rows, Index dimension) {
    return static_cast<int>(std::min<Index>(10, std::max<Index>(0, (rows - 1) / (3 * dimension))));
}

OrderSelection select_order(const Eigen::Ref<const Eigen::MatrixXd>& segment, int max_order,
                            OrderCriterion criterion) {
    if (max_order < 0) throw ConfigError("maximum VAR order must be non-negative");
    const Index n = segment.rows();
    const Index dim = segment.cols();
    const Index usable = n - max_order;
    if (usable <= max_order * dim + 1 || usable < 2) {
        throw InsufficientData("segment of " + std::to_string(n) + " rows cannot support VAR order " +
                               std::to_string(max_order));
    }
    const Eigen::MatrixXd y = segment.rowwise() - segment.colwise().mean();
    const double n_eff = static_cast<double>(usable);
    OrderSelection sel;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_order; ++p) {
        const LeastSquares ls = regress(y, p, max_order);
        const Eigen::MatrixXd sigma = ls.residuals.transpose() * ls.residuals / n_eff;
        const double det = sigma.determinant();
        if (!(det > 0.0)) {
            throw RankDeficient("innovation covariance is singular at VAR order " + std::to_string(p));
        }
        const double params = static_cast<double>(p * dim * dim + dim);
        const double penalty = criterion == OrderCriterion::AIC ? 2.0 * params : std::log(n_eff) * params;
        const double score = n_eff * std::log(det) + penalty;
        sel.scores.push_back(score);
        if (score < best) {
            best = score;
            sel.order = p;
        }
    }
    return sel;
}

Eigen::MatrixXd simulate_var(const VarModel& model, Index length, std::uint64_t seed) {
    if (length < 1) throw ConfigError("simulation length must be positive");
    if (!model.stable()) {
        throw UnstableModel("VAR model is not stable (companion spectral radius " +
                            std::to_string(model.spectral_radius()) + ")");
    }
    const Index dim = model.dimension();
    const Index draws = model.residuals.rows();
    if (draws < 1) throw InsufficientData("VAR model has no stored innovations");
    const int p = model.order;
    const Index burn = 10 * p;
    const Index total = burn + length;
    Rng rng(seed);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(total + p, dim);
    for (Index t = p; t < total + p; ++t) {
        Eigen::VectorXd next = model.intercept;
        for (int i = 1; i <= p; ++i) next.noalias() += model.coefficients[static_cast<std::size_t>(i - 1)] * y.row(t - i).transpose();
        next += model.residuals.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(draws)))).transpose();
        y.row(t) = next.transpose();
    }
    Eigen::MatrixXd out = y.bottomRows(length);
    out.rowwise() += model.mean.transpose();
    return out;
}

}  // namespace nonstat

#pragma once

#include "nonstat/error.hpp"
#include "nonstat/series.hpp"

#include <limits>
#include <string>
#include <vector>

namespace nonstat {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize  sum_i q_i x_i^2 + c' x   s.t.  A x = b,  lower <= x <= upper.
/// q >= 0, so the Hessian diag(2 q) is positive semidefinite. Bounds may be
/// infinite; lower == upper fixes a variable.
struct QpInstance {
    Eigen::VectorXd quadratic;
    Eigen::VectorXd linear;
    Eigen::MatrixXd constraints;
    Eigen::VectorXd rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<std::string> variable_names;

    // Index map filled by build_qp; zero-sized for hand-built instances.
    Index gen_offset = 0, gen_count = 0;
    Index load_offset = 0, load_count = 0;
    Index flow_offset = 0, flow_count = 0;
    Index angle_offset = 0, angle_count = 0;
    Index balance_rows = 0;  ///< rows [0, balance_rows) are per-bus balance, in bus order

    Index variables() const noexcept { return linear.size(); }
    Index rows() const noexcept { return rhs.size(); }
    Eigen::VectorXd hessian_diagonal() const { return 2.0 * quadratic; }
    double objective(const Eigen::VectorXd& x) const { return quadratic.dot(x.cwiseAbs2()) + linear.dot(x); }
    /// Errors: ConfigError on inconsistent dimensions or a negative quadratic term.
    void validate() const;
};

enum class QpStatus { Optimal, Infeasible, IterationLimit };

/// Primal-dual pair for A x = b with multipliers y and bound multipliers
/// z_lower, z_upper >= 0, satisfying  2 q x + c - A' y - z_lower + z_upper = 0.
/// y is the marginal change of the optimal value per unit increase of b.
struct QpSolution {
    QpStatus status = QpStatus::IterationLimit;
    Eigen::VectorXd primal;
    Eigen::VectorXd duals;
    Eigen::VectorXd lower_duals;
    Eigen::VectorXd upper_duals;
    double objective = 0.0;
    double kkt_residual = 0.0;  ///< max of scaled primal, stationarity and complementarity residuals
    int iterations = 0;
};

struct QpOptions {
    double tolerance = 1e-9;
    int max_iterations = 200;
};

class InfeasibleProblem : public Error {
public:
    using Error::Error;
};

class IterationLimit : public Error {
public:
    IterationLimit(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// KKT residuals of a candidate solution in the instance's own units.
struct KktReport {
    double primal = 0.0;          ///< ||A x - b||_inf and bound violations, / (1 + ||b||_inf)
    double stationarity = 0.0;    ///< ||2 q x + c - A'y - zl + zu||_inf / (1 + ||c||_inf)
    double complementarity = 0.0; ///< max |(x - l) zl|, |(u - x) zu| and dual sign violations
    double max() const { return std::max({primal, stationarity, complementarity}); }
};

KktReport kkt_residuals(const QpInstance& q, const QpSolution& s);

/// Mehrotra predictor-corrector interior point on a Ruiz-equilibrated copy of
/// the instance. Fixed variables are eliminated before the solve.
/// Errors: InfeasibleProblem (empty feasible set, confirmed by a phase-one
/// solve), IterationLimit (carries the best residual reached).
QpSolution solve_qp(const QpInstance& q, const QpOptions& opts = {});

}  // namespace nonstat

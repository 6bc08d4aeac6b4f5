#include "nonstat/qp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace nonstat {

namespace {

struct IpmResult {
    bool converged = false;
    Eigen::VectorXd x, y, zl, zu;
    int iterations = 0;
    double residual = kInf;
};

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Largest step in (0, 1] keeping v + step * dv >= 0 where mask is set.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, const std::vector<bool>& mask) {
    double step = 1.0;
    for (Index i = 0; i < v.size(); ++i) {
        if (mask[static_cast<std::size_t>(i)] && dv(i) < 0.0) step = std::min(step, -v(i) / dv(i));
    }
    return step;
}

// Interior point on an instance without fixed variables or empty rows.
IpmResult interior_point(const QpInstance& q, double tol, int max_iterations) {
    const Index n = q.variables();
    const Index m = q.rows();

    // Ruiz equilibration of [H A'; A 0] followed by cost scaling.
    Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(m);
    Eigen::MatrixXd a = q.constraints;
    Eigen::VectorXd hess = q.hessian_diagonal();
    for (int pass = 0; pass < 15; ++pass) {
        Eigen::VectorXd cn = hess.cwiseAbs();
        if (m > 0) cn = cn.cwiseMax(a.cwiseAbs().colwise().maxCoeff().transpose());
        Eigen::VectorXd rn = m > 0 ? Eigen::VectorXd(a.cwiseAbs().rowwise().maxCoeff()) : Eigen::VectorXd();
        for (Index j = 0; j < n; ++j) cn(j) = cn(j) > 0.0 ? 1.0 / std::sqrt(cn(j)) : 1.0;
        for (Index i = 0; i < m; ++i) rn(i) = rn(i) > 0.0 ? 1.0 / std::sqrt(rn(i)) : 1.0;
        a = rn.asDiagonal() * a * cn.asDiagonal();
        hess = hess.cwiseProduct(cn.cwiseAbs2());
        col_scale = col_scale.cwiseProduct(cn);
        row_scale = row_scale.cwiseProduct(rn);
    }
    Eigen::VectorXd c = q.linear.cwiseProduct(col_scale);
    const double cost_scale = 1.0 / std::max({1.0, inf_norm(c), inf_norm(hess)});
    c *= cost_scale;
    hess *= cost_scale;
    const Eigen::VectorXd b = row_scale.cwiseProduct(q.rhs);
    const Eigen::VectorXd lo = q.lower.cwiseQuotient(col_scale);
    const Eigen::VectorXd up = q.upper.cwiseQuotient(col_scale);

    std::vector<bool> has_lo(static_cast<std::size_t>(n)), has_up(static_cast<std::size_t>(n));
    Index bounded = 0;
    Eigen::VectorXd x(n);
    for (Index j = 0; j < n; ++j) {
        const bool l = std::isfinite(lo(j)), u = std::isfinite(up(j));
        has_lo[static_cast<std::size_t>(j)] = l;
        has_up[static_cast<std::size_t>(j)] = u;
        bounded += l + u;
        if (l && u) x(j) = 0.5 * (lo(j) + up(j));
        else if (l) x(j) = lo(j) + 1.0;
        else if (u) x(j) = up(j) - 1.0;
        else x(j) = 0.0;
    }
    Eigen::VectorXd zl = Eigen::VectorXd::Zero(n), zu = Eigen::VectorXd::Zero(n);
    for (Index j = 0; j < n; ++j) {
        if (has_lo[static_cast<std::size_t>(j)]) zl(j) = 1.0;
        if (has_up[static_cast<std::size_t>(j)]) zu(j) = 1.0;
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    const double b_norm = 1.0 + inf_norm(b);
    const double c_norm = 1.0 + inf_norm(c);
    constexpr double reg = 1e-11;
    IpmResult result;

    Eigen::VectorXd sl(n), su(n), inv_sl(n), inv_su(n);
    Eigen::MatrixXd kkt(n + m, n + m);
    for (int iter = 0; iter <= max_iterations; ++iter) {
        for (Index j = 0; j < n; ++j) {
            sl(j) = has_lo[static_cast<std::size_t>(j)] ? x(j) - lo(j) : 1.0;
            su(j) = has_up[static_cast<std::size_t>(j)] ? up(j) - x(j) : 1.0;
            inv_sl(j) = has_lo[static_cast<std::size_t>(j)] ? 1.0 / sl(j) : 0.0;
            inv_su(j) = has_up[static_cast<std::size_t>(j)] ? 1.0 / su(j) : 0.0;
        }
        const Eigen::VectorXd rd = hess.cwiseProduct(x) + c - a.transpose() * y - zl + zu;
        const Eigen::VectorXd rp = a * x - b;
        // zl and zu stay zero on absent bounds, so the dot products only see real pairs.
        const double mu = bounded ? (sl.dot(zl) + su.dot(zu)) / static_cast<double>(bounded) : 0.0;
        const double residual = std::max({inf_norm(rp) / b_norm, inf_norm(rd) / c_norm, mu});
        result.iterations = iter;
        if (residual < result.residual) {
            result.residual = residual;
            result.x = x;
            result.y = y;
            result.zl = zl;
            result.zu = zu;
        }
        if (inf_norm(rp) <= tol * b_norm && inf_norm(rd) <= tol * c_norm && mu <= tol) {
            result.converged = true;
            result.x = x;
            result.y = y;
            result.zl = zl;
            result.zu = zu;
            break;
        }
        if (iter == max_iterations || !x.allFinite() || !y.allFinite() || inf_norm(x) > 1e14 ||
            inf_norm(y) > 1e14) {
            break;
        }

        kkt.setZero();
        const Eigen::VectorXd sigma = zl.cwiseProduct(inv_sl) + zu.cwiseProduct(inv_su);
        kkt.topLeftCorner(n, n).diagonal() = hess + sigma + Eigen::VectorXd::Constant(n, reg);
        kkt.topRightCorner(n, m) = -a.transpose();
        kkt.bottomLeftCorner(m, n) = a;
        kkt.bottomRightCorner(m, m).diagonal().setConstant(reg);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);

        auto solve = [&](const Eigen::VectorXd& rcl, const Eigen::VectorXd& rcu, Eigen::VectorXd& dx,
                         Eigen::VectorXd& dy, Eigen::VectorXd& dzl, Eigen::VectorXd& dzu) {
            Eigen::VectorXd rhs(n + m);
            rhs.head(n) = -rd + rcl.cwiseProduct(inv_sl) - rcu.cwiseProduct(inv_su);
            rhs.tail(m) = -rp;
            const Eigen::VectorXd d = lu.solve(rhs);
            dx = d.head(n);
            dy = d.tail(m);
            dzl = (rcl - zl.cwiseProduct(dx)).cwiseProduct(inv_sl);
            dzu = (rcu + zu.cwiseProduct(dx)).cwiseProduct(inv_su);
        };
        auto step_length = [&](const Eigen::VectorXd& dx, const Eigen::VectorXd& dzl, const Eigen::VectorXd& dzu) {
            const Eigen::VectorXd neg_dx = -dx;
            return std::min({max_step(sl, dx, has_lo), max_step(su, neg_dx, has_up), max_step(zl, dzl, has_lo),
                             max_step(zu, dzu, has_up)});
        };

        Eigen::VectorXd dx, dy, dzl, dzu;
        Eigen::VectorXd rcl = -sl.cwiseProduct(zl);
        Eigen::VectorXd rcu = -su.cwiseProduct(zu);
        solve(rcl, rcu, dx, dy, dzl, dzu);
        double alpha = step_length(dx, dzl, dzu);

        if (bounded) {
            double mu_aff = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (has_lo[static_cast<std::size_t>(j)]) mu_aff += (sl(j) + alpha * dx(j)) * (zl(j) + alpha * dzl(j));
                if (has_up[static_cast<std::size_t>(j)]) mu_aff += (su(j) - alpha * dx(j)) * (zu(j) + alpha * dzu(j));
            }
            mu_aff /= static_cast<double>(bounded);
            const double centering = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
            for (Index j = 0; j < n; ++j) {
                if (has_lo[static_cast<std::size_t>(j)]) rcl(j) = centering * mu - sl(j) * zl(j) - dx(j) * dzl(j);
                if (has_up[static_cast<std::size_t>(j)]) rcu(j) = centering * mu - su(j) * zu(j) + dx(j) * dzu(j);
            }
            solve(rcl, rcu, dx, dy, dzl, dzu);
            alpha = step_length(dx, dzl, dzu);
        }
        const double step = std::min(1.0, 0.995 * alpha);
        x += step * dx;
        y += step * dy;
        zl += step * dzl;
        zu += step * dzu;
    }

    // Back to the caller's units.
    result.x = result.x.cwiseProduct(col_scale);
    result.y = result.y.cwiseProduct(row_scale) / cost_scale;
    result.zl = result.zl.cwiseQuotient(col_scale) / cost_scale;
    result.zu = result.zu.cwiseQuotient(col_scale) / cost_scale;
    return result;
}

// Minimum total constraint violation over the bounds; zero iff the instance is feasible.
double phase_one_violation(const QpInstance& q, double tol, int max_iterations) {
    const Index n = q.variables();
    const Index m = q.rows();
    QpInstance p;
    p.quadratic = Eigen::VectorXd::Zero(n + 2 * m);
    p.linear = Eigen::VectorXd::Zero(n + 2 * m);
    p.linear.tail(2 * m).setOnes();
    p.constraints = Eigen::MatrixXd::Zero(m, n + 2 * m);
    p.constraints.leftCols(n) = q.constraints;
    p.constraints.middleCols(n, m) = Eigen::MatrixXd::Identity(m, m);
    p.constraints.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);
    p.rhs = q.rhs;
    p.lower = Eigen::VectorXd::Zero(n + 2 * m);
    p.lower.head(n) = q.lower;
    p.upper = Eigen::VectorXd::Constant(n + 2 * m, kInf);
    p.upper.head(n) = q.upper;
    const IpmResult r = interior_point(p, tol, max_iterations);
    return r.x.size() ? p.linear.dot(r.x) : kInf;
}

}  // namespace

void QpInstance::validate() const {
    const Index n = linear.size();
    if (quadratic.size() != n || lower.size() != n || upper.size() != n || constraints.cols() != n ||
        constraints.rows() != rhs.size()) {
        throw ConfigError("QP instance has inconsistent dimensions");
    }
    if ((quadratic.array() < 0.0).any()) throw ConfigError("QP quadratic terms must be non-negative");
    if (!constraints.allFinite() || !rhs.allFinite() || !linear.allFinite() || !quadratic.allFinite()) {
        throw ConfigError("QP data must be finite");
    }
}

KktReport kkt_residuals(const QpInstance& q, const QpSolution& s) {
    KktReport r;
    const auto& x = s.primal;
    double primal = inf_norm(q.constraints * x - q.rhs);
    double comp = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        if (std::isfinite(q.lower(j))) {
            primal = std::max(primal, q.lower(j) - x(j));
            comp = std::max(comp, std::abs((x(j) - q.lower(j)) * s.lower_duals(j)));
        } else {
            comp = std::max(comp, std::abs(s.lower_duals(j)));
        }
        if (std::isfinite(q.upper(j))) {
            primal = std::max(primal, x(j) - q.upper(j));
            comp = std::max(comp, std::abs((q.upper(j) - x(j)) * s.upper_duals(j)));
        } else {
            comp = std::max(comp, std::abs(s.upper_duals(j)));
        }
        comp = std::max({comp, -s.lower_duals(j), -s.upper_duals(j)});
    }
    r.primal = primal / (1.0 + inf_norm(q.rhs));
    const Eigen::VectorXd grad = q.hessian_diagonal().cwiseProduct(x) + q.linear;
    r.stationarity =
        inf_norm(grad - q.constraints.transpose() * s.duals - s.lower_duals + s.upper_duals) / (1.0 + inf_norm(q.linear));
    r.complementarity = comp / (1.0 + inf_norm(q.linear));
    return r;
}

QpSolution solve_qp(const QpInstance& q, const QpOptions& opts) {
    q.validate();
    const Index n = q.variables();
    const Index m = q.rows();
    for (Index j = 0; j < n; ++j) {
        if (q.lower(j) > q.upper(j)) {
            throw InfeasibleProblem("variable " + (j < static_cast<Index>(q.variable_names.size())
                                                       ? q.variable_names[static_cast<std::size_t>(j)]
                                                       : std::to_string(j)) +
                                    " has lower bound above upper bound");
        }
    }

    // Eliminate fixed variables and the rows they leave empty.
    std::vector<Index> free_vars;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Index j = 0; j < n; ++j) {
        const bool fixed = std::isfinite(q.lower(j)) &&
                           q.upper(j) - q.lower(j) <= 1e-12 * std::max(1.0, std::abs(q.lower(j)));
        if (fixed) x(j) = q.lower(j);
        else free_vars.push_back(j);
    }
    const Eigen::VectorXd rhs = q.rhs - q.constraints * x;
    std::vector<Index> live_rows;
    for (Index i = 0; i < m; ++i) {
        bool empty = true;
        for (Index j : free_vars) empty = empty && q.constraints(i, j) == 0.0;
        if (!empty) live_rows.push_back(i);
        else if (std::abs(rhs(i)) > opts.tolerance * (1.0 + inf_norm(q.rhs))) {
            throw InfeasibleProblem("constraint row " + std::to_string(i) + " cannot be satisfied");
        }
    }

    QpSolution sol;
    sol.duals = Eigen::VectorXd::Zero(m);
    if (!free_vars.empty()) {
        QpInstance r;
        const auto nf = static_cast<Index>(free_vars.size());
        const auto mr = static_cast<Index>(live_rows.size());
        r.quadratic.resize(nf);
        r.linear.resize(nf);
        r.lower.resize(nf);
        r.upper.resize(nf);
        r.constraints.resize(mr, nf);
        r.rhs.resize(mr);
        for (Index k = 0; k < nf; ++k) {
            const Index j = free_vars[static_cast<std::size_t>(k)];
            r.quadratic(k) = q.quadratic(j);
            r.linear(k) = q.linear(j);
            r.lower(k) = q.lower(j);
            r.upper(k) = q.upper(j);
            for (Index i = 0; i < mr; ++i) r.constraints(i, k) = q.constraints(live_rows[static_cast<std::size_t>(i)], j);
        }
        for (Index i = 0; i < mr; ++i) r.rhs(i) = rhs(live_rows[static_cast<std::size_t>(i)]);

        const IpmResult ipm = interior_point(r, opts.tolerance * 1e-2, opts.max_iterations);
        if (!ipm.converged) {
            const double violation = phase_one_violation(r, opts.tolerance * 1e-2, opts.max_iterations);
            if (violation > 1e-6 * (1.0 + inf_norm(r.rhs))) {
                throw InfeasibleProblem("no point satisfies the constraints (minimum violation " +
                                        std::to_string(violation) + ")");
            }
            throw IterationLimit("interior point did not converge in " + std::to_string(opts.max_iterations) +
                                     " iterations",
                                 ipm.residual);
        }
        for (Index k = 0; k < nf; ++k) x(free_vars[static_cast<std::size_t>(k)]) = ipm.x(k);
        for (Index i = 0; i < mr; ++i) sol.duals(live_rows[static_cast<std::size_t>(i)]) = ipm.y(i);
        sol.iterations = ipm.iterations;
    } else if (!live_rows.empty()) {
        throw InfeasibleProblem("all variables are fixed and the constraints are violated");
    }

    // Bound multipliers from stationarity: the interior point's own values for
    // free variables would leave O(mu) slack; recomputing keeps signs exact.
    sol.primal = x;
    sol.lower_duals = Eigen::VectorXd::Zero(n);
    sol.upper_duals = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd reduced_cost =
        q.hessian_diagonal().cwiseProduct(x) + q.linear - q.constraints.transpose() * sol.duals;
    for (Index j = 0; j < n; ++j) {
        const double g = reduced_cost(j);
        const double width = std::max(1.0, std::abs(x(j)));
        const bool at_lower = std::isfinite(q.lower(j)) && x(j) - q.lower(j) <= 1e-7 * width;
        const bool at_upper = std::isfinite(q.upper(j)) && q.upper(j) - x(j) <= 1e-7 * width;
        if (g > 0.0 && at_lower) sol.lower_duals(j) = g;
        else if (g < 0.0 && at_upper) sol.upper_duals(j) = -g;
    }
    sol.objective = q.objective(sol.primal);
    sol.status = QpStatus::Optimal;
    sol.kkt_residual = kkt_residuals(q, sol).max();
    return sol;
}

}  // namespace nonstat

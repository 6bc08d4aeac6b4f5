#pragma once

#include "nonstat/qp.hpp"
#include "nonstat/series.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nonstat {

struct Bus {
    int id = 0;
    double voltage = 1.0;  ///< per unit
};

struct Line {
    int from = 0;
    int to = 0;
    double reactance = 0.0;
    double flow_min = -kInf;
    double flow_max = kInf;
};

/// Quadratic cost a g^2 + b g; ramp_down <= 0 <= ramp_up bound the change from the previous period.
struct Generator {
    int bus = 0;
    double a = 0.0;
    double b = 0.0;
    double gmin = 0.0;
    double gmax = 0.0;
    double ramp_down = -kInf;
    double ramp_up = kInf;
    bool wind = false;
};

/// Bid price per MW served and the demand cap per period. A single entry
/// holds for every period; k entries for T periods with k | T are each held
/// for T/k consecutive periods.
struct Load {
    int bus = 0;
    double bid = 0.0;
    std::vector<double> demand;
};

struct NetworkCase {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<Load> loads;

    /// Errors: CaseError for unknown buses, a < 0, gmin > gmax, ramp limits
    /// not bracketing zero, non-positive reactance, or a disconnected network.
    void validate() const;
    Index bus_position(int id) const;
    /// Lowest-numbered bus; its angle is pinned to zero.
    Index reference_bus() const;
    std::vector<Index> wind_generators() const;
    /// periods x loads matrix of demand caps.
    Eigen::MatrixXd demand_profile(Index periods) const;
};

struct PowerCurve {
    double cut_in = 3.0;
    double rated_speed = 13.0;
    double cut_out = 25.0;
    double rated_power = 21.02;

    /// Errors: ConfigError unless 0 <= cut_in < rated_speed < cut_out and rated_power > 0.
    void validate() const;
};

/// Zero below cut-in and from cut-out up, rated power on [rated, cut-out),
/// cubic in between. Errors: DomainError for negative or non-finite speed.
double wind_to_power(double speed, const PowerCurve& curve);

/// Dispatch QP for one period. Variables are ordered g, d, f, theta; rows are
/// the per-bus balance (bus order) followed by the DC flow definitions.
/// Ramping intersects the generator bounds unless `first_period`; wind
/// generators have their upper bound lowered to their cap. The reference
/// angle is fixed through its bounds.
QpInstance build_qp(const NetworkCase& network, const Eigen::VectorXd& wind_cap, const Eigen::VectorXd& previous,
                    const Eigen::VectorXd& demand, bool first_period);

/// Per-bus locational marginal prices (duals of the balance rows).
/// Errors: StateError unless the solution is optimal.
Eigen::VectorXd extract_lmp(const QpSolution& solution, const QpInstance& instance);

struct DispatchTrace {
    Eigen::MatrixXd generation;   ///< periods x generators
    Eigen::MatrixXd demand_met;   ///< periods x loads
    Eigen::MatrixXd flows;        ///< periods x lines
    Eigen::MatrixXd lmp;          ///< periods x buses
    Eigen::VectorXd total_conventional;
    Eigen::VectorXd objective;
    Eigen::VectorXd kkt_residual;

    Index periods() const noexcept { return total_conventional.size(); }
};

class PeriodInfeasible : public Error {
public:
    PeriodInfeasible(Index period, DispatchTrace partial, const std::string& reason)
        : Error("dispatch infeasible at period " + std::to_string(period) + ": " + reason),
          period_(period), partial_(std::move(partial)) {}
    /// 1-based period that failed.
    Index period() const noexcept { return period_; }
    /// Periods solved before the failure.
    const DispatchTrace& partial() const noexcept { return partial_; }

private:
    Index period_;
    DispatchTrace partial_;
};

/// Solves the dispatch period by period, feeding each optimal generation into
/// the next period's ramping limits. wind_speeds has one column per wind
/// generator (in generator order); demand has one row per period.
DispatchTrace rolling_horizon(const NetworkCase& network, const MultivariateSeries& wind_speeds,
                              const PowerCurve& curve, const Eigen::MatrixXd& demand, const QpOptions& opts = {});

/// CSV columns: t, g_1..g_G, d_1..d_D, pi_1..pi_B, total_conventional.
void write_trace_csv(std::ostream& sink, const DispatchTrace& trace);

}  // namespace nonstat

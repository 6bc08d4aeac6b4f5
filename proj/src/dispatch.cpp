#include "nonstat/dispatch.hpp"

#include "nonstat/csv.hpp"
#include "nonstat/log.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

namespace nonstat {

void NetworkCase::validate() const {
    if (buses.empty()) throw CaseError("case has no buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        for (std::size_t k = i + 1; k < buses.size(); ++k) {
            if (buses[i].id == buses[k].id) throw CaseError("duplicate bus id " + std::to_string(buses[i].id));
        }
        if (!(buses[i].voltage > 0.0)) throw CaseError("bus " + std::to_string(buses[i].id) + " needs V > 0");
    }
    for (const auto& l : lines) {
        bus_position(l.from);
        bus_position(l.to);
        if (l.from == l.to) throw CaseError("line connects bus " + std::to_string(l.from) + " to itself");
        if (!(l.reactance > 0.0)) throw CaseError("line reactance must be positive");
        if (l.flow_min > l.flow_max) throw CaseError("line flow bounds are inverted");
    }
    for (const auto& g : generators) {
        bus_position(g.bus);
        if (!(g.a >= 0.0)) throw CaseError("generator quadratic cost must be non-negative");
        if (g.gmin > g.gmax) throw CaseError("generator gmin exceeds gmax");
        if (!(g.ramp_down <= 0.0 && g.ramp_up >= 0.0)) throw CaseError("ramp limits must bracket zero");
    }
    for (const auto& d : loads) {
        bus_position(d.bus);
        if (d.demand.empty()) throw CaseError("load at bus " + std::to_string(d.bus) + " has no demand");
        for (double v : d.demand) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw CaseError("demand must be finite and non-negative");
        }
    }
    // Connectivity by breadth-first search over lines.
    std::vector<std::vector<Index>> adjacent(buses.size());
    for (const auto& l : lines) {
        adjacent[static_cast<std::size_t>(bus_position(l.from))].push_back(bus_position(l.to));
        adjacent[static_cast<std::size_t>(bus_position(l.to))].push_back(bus_position(l.from));
    }
    std::vector<bool> seen(buses.size(), false);
    std::queue<Index> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const Index b = frontier.front();
        frontier.pop();
        for (Index nb : adjacent[static_cast<std::size_t>(b)]) {
            if (!seen[static_cast<std::size_t>(nb)]) {
                seen[static_cast<std::size_t>(nb)] = true;
                ++reached;
                frontier.push(nb);
            }
        }
    }
    if (reached != buses.size()) throw CaseError("network is not connected");
}

Index NetworkCase::bus_position(int id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) return static_cast<Index>(i);
    }
    throw CaseError("unknown bus id " + std::to_string(id));
}

Index NetworkCase::reference_bus() const {
    const auto it = std::min_element(buses.begin(), buses.end(),
                                     [](const Bus& x, const Bus& y) { return x.id < y.id; });
    return static_cast<Index>(it - buses.begin());
}

std::vector<Index> NetworkCase::wind_generators() const {
    std::vector<Index> idx;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (generators[i].wind) idx.push_back(static_cast<Index>(i));
    }
    return idx;
}

Eigen::MatrixXd NetworkCase::demand_profile(Index periods) const {
    Eigen::MatrixXd profile(periods, static_cast<Index>(loads.size()));
    for (std::size_t k = 0; k < loads.size(); ++k) {
        const auto& demand = loads[k].demand;
        const auto entries = static_cast<Index>(demand.size());
        if (entries != 1 && periods % entries != 0) {
            throw CaseError("load at bus " + std::to_string(loads[k].bus) + " has " + std::to_string(entries) +
                            " demand entries, which does not divide " + std::to_string(periods) + " periods");
        }
        const Index hold = entries == 1 ? periods : periods / entries;
        for (Index t = 0; t < periods; ++t) {
            profile(t, static_cast<Index>(k)) = demand[static_cast<std::size_t>(entries == 1 ? 0 : t / hold)];
        }
    }
    return profile;
}

void PowerCurve::validate() const {
    if (!(cut_in >= 0.0 && cut_in < rated_speed && rated_speed < cut_out && rated_power > 0.0)) {
        throw ConfigError("power curve needs 0 <= cut_in < rated_speed < cut_out and rated_power > 0");
    }
}

double wind_to_power(double speed, const PowerCurve& curve) {
    curve.validate();
    if (!(speed >= 0.0) || !std::isfinite(speed)) throw DomainError("wind speed must be finite and non-negative");
    if (speed < curve.cut_in || speed >= curve.cut_out) return 0.0;
    if (speed >= curve.rated_speed) return curve.rated_power;
    const double ci3 = curve.cut_in * curve.cut_in * curve.cut_in;
    const double r3 = curve.rated_speed * curve.rated_speed * curve.rated_speed;
    return curve.rated_power * (speed * speed * speed - ci3) / (r3 - ci3);
}

QpInstance build_qp(const NetworkCase& network, const Eigen::VectorXd& wind_cap, const Eigen::VectorXd& previous,
                    const Eigen::VectorXd& demand, bool first_period) {
    network.validate();
    const auto ng = static_cast<Index>(network.generators.size());
    const auto nd = static_cast<Index>(network.loads.size());
    const auto nl = static_cast<Index>(network.lines.size());
    const auto nb = static_cast<Index>(network.buses.size());
    const auto winds = network.wind_generators();
    if (wind_cap.size() != static_cast<Index>(winds.size())) {
        throw ConfigError("expected " + std::to_string(winds.size()) + " wind capacities");
    }
    if (demand.size() != nd) throw ConfigError("expected " + std::to_string(nd) + " demand values");
    if (!first_period && previous.size() != ng) throw ConfigError("expected previous generation for every generator");

    QpInstance q;
    q.gen_offset = 0;
    q.gen_count = ng;
    q.load_offset = ng;
    q.load_count = nd;
    q.flow_offset = ng + nd;
    q.flow_count = nl;
    q.angle_offset = ng + nd + nl;
    q.angle_count = nb;
    q.balance_rows = nb;
    const Index n = ng + nd + nl + nb;
    q.quadratic = Eigen::VectorXd::Zero(n);
    q.linear = Eigen::VectorXd::Zero(n);
    q.lower = Eigen::VectorXd::Constant(n, -kInf);
    q.upper = Eigen::VectorXd::Constant(n, kInf);
    q.constraints = Eigen::MatrixXd::Zero(nb + nl, n);
    q.rhs = Eigen::VectorXd::Zero(nb + nl);

    std::size_t wind_slot = 0;
    for (Index i = 0; i < ng; ++i) {
        const auto& g = network.generators[static_cast<std::size_t>(i)];
        q.variable_names.push_back("g_" + std::to_string(i + 1));
        q.quadratic(i) = g.a;
        q.linear(i) = g.b;
        double lo = g.gmin;
        double hi = g.gmax;
        if (g.wind) hi = std::min(hi, wind_cap(static_cast<Index>(wind_slot++)));
        if (!first_period) {
            lo = std::max(lo, previous(i) + g.ramp_down);
            hi = std::min(hi, previous(i) + g.ramp_up);
        }
        q.lower(i) = lo;
        q.upper(i) = hi;
        q.constraints(network.bus_position(g.bus), i) += 1.0;
    }
    for (Index k = 0; k < nd; ++k) {
        const auto& d = network.loads[static_cast<std::size_t>(k)];
        const Index v = q.load_offset + k;
        q.variable_names.push_back("d_" + std::to_string(k + 1));
        q.linear(v) = -d.bid;
        q.lower(v) = 0.0;
        q.upper(v) = demand(k);
        q.constraints(network.bus_position(d.bus), v) -= 1.0;
    }
    for (Index l = 0; l < nl; ++l) {
        const auto& line = network.lines[static_cast<std::size_t>(l)];
        const Index v = q.flow_offset + l;
        const Index from = network.bus_position(line.from);
        const Index to = network.bus_position(line.to);
        q.variable_names.push_back("f_" + std::to_string(line.from) + "_" + std::to_string(line.to));
        q.lower(v) = line.flow_min;
        q.upper(v) = line.flow_max;
        q.constraints(from, v) -= 1.0;
        q.constraints(to, v) += 1.0;
        const double susceptance = network.buses[static_cast<std::size_t>(from)].voltage *
                                   network.buses[static_cast<std::size_t>(to)].voltage / line.reactance;
        const Index row = nb + l;
        q.constraints(row, v) = 1.0;
        q.constraints(row, q.angle_offset + from) = -susceptance;
        q.constraints(row, q.angle_offset + to) = susceptance;
    }
    for (Index b = 0; b < nb; ++b) {
        q.variable_names.push_back("theta_" + std::to_string(network.buses[static_cast<std::size_t>(b)].id));
    }
    const Index ref = q.angle_offset + network.reference_bus();
    q.lower(ref) = 0.0;
    q.upper(ref) = 0.0;
    return q;
}

Eigen::VectorXd extract_lmp(const QpSolution& solution, const QpInstance& instance) {
    if (solution.status != QpStatus::Optimal) throw StateError("prices require an optimal solution");
    return solution.duals.head(instance.balance_rows);
}

DispatchTrace rolling_horizon(const NetworkCase& network, const MultivariateSeries& wind_speeds,
                              const PowerCurve& curve, const Eigen::MatrixXd& demand, const QpOptions& opts) {
    network.validate();
    curve.validate();
    const auto winds = network.wind_generators();
    if (wind_speeds.dimension() != static_cast<Index>(winds.size())) {
        throw ConfigError("wind series has " + std::to_string(wind_speeds.dimension()) + " columns but the case has " +
                          std::to_string(winds.size()) + " wind generators");
    }
    const Index periods = wind_speeds.length();
    if (demand.rows() != periods || demand.cols() != static_cast<Index>(network.loads.size())) {
        throw ConfigError("demand profile must have one row per period and one column per load");
    }
    const auto ng = static_cast<Index>(network.generators.size());
    DispatchTrace trace;
    trace.generation.resize(periods, ng);
    trace.demand_met.resize(periods, demand.cols());
    trace.flows.resize(periods, static_cast<Index>(network.lines.size()));
    trace.lmp.resize(periods, static_cast<Index>(network.buses.size()));
    trace.total_conventional.resize(periods);
    trace.objective.resize(periods);
    trace.kkt_residual.resize(periods);

    bool clamped = false;
    Eigen::VectorXd previous = Eigen::VectorXd::Zero(ng);
    Eigen::VectorXd caps(static_cast<Index>(winds.size()));
    for (Index t = 0; t < periods; ++t) {
        for (Index w = 0; w < caps.size(); ++w) {
            double speed = wind_speeds.values()(t, w);
            if (speed < 0.0) {
                if (!clamped) warn("negative wind speeds clamped to zero");
                clamped = true;
                speed = 0.0;
            }
            caps(w) = wind_to_power(speed, curve);
        }
        const QpInstance q = build_qp(network, caps, previous, demand.row(t).transpose(), t == 0);
        QpSolution sol;
        try {
            sol = solve_qp(q, opts);
        } catch (const Error& e) {
            DispatchTrace partial = trace;
            partial.generation.conservativeResize(t, Eigen::NoChange);
            partial.demand_met.conservativeResize(t, Eigen::NoChange);
            partial.flows.conservativeResize(t, Eigen::NoChange);
            partial.lmp.conservativeResize(t, Eigen::NoChange);
            partial.total_conventional.conservativeResize(t);
            partial.objective.conservativeResize(t);
            partial.kkt_residual.conservativeResize(t);
            throw PeriodInfeasible(t + 1, std::move(partial), e.what());
        }
        previous = sol.primal.segment(q.gen_offset, q.gen_count);
        trace.generation.row(t) = previous.transpose();
        trace.demand_met.row(t) = sol.primal.segment(q.load_offset, q.load_count).transpose();
        trace.flows.row(t) = sol.primal.segment(q.flow_offset, q.flow_count).transpose();
        trace.lmp.row(t) = extract_lmp(sol, q).transpose();
        double conventional = 0.0;
        for (Index i = 0; i < ng; ++i) {
            if (!network.generators[static_cast<std::size_t>(i)].wind) conventional += previous(i);
        }
        trace.total_conventional(t) = conventional;
        trace.objective(t) = sol.objective;
        trace.kkt_residual(t) = sol.kkt_residual;
    }
    return trace;
}

void write_trace_csv(std::ostream& sink, const DispatchTrace& trace) {
    sink << "t";
    for (Index i = 0; i < trace.generation.cols(); ++i) sink << ",g_" << i + 1;
    for (Index i = 0; i < trace.demand_met.cols(); ++i) sink << ",d_" << i + 1;
    for (Index i = 0; i < trace.lmp.cols(); ++i) sink << ",pi_" << i + 1;
    sink << ",total_conventional\n";
    for (Index t = 0; t < trace.periods(); ++t) {
        sink << t + 1;
        for (Index i = 0; i < trace.generation.cols(); ++i) sink << ',' << format_double(trace.generation(t, i));
        for (Index i = 0; i < trace.demand_met.cols(); ++i) sink << ',' << format_double(trace.demand_met(t, i));
        for (Index i = 0; i < trace.lmp.cols(); ++i) sink << ',' << format_double(trace.lmp(t, i));
        sink << ',' << format_double(trace.total_conventional(t)) << '\n';
    }
}

}  // namespace nonstat

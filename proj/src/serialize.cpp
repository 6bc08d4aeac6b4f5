#include "nonstat/serialize.hpp"

#include "nonstat/error.hpp"
#include "nonstat/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace nonstat {

namespace {

Json matrix_rows(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::MatrixXd rows_matrix(const Json& j, Index cols) {
    Eigen::MatrixXd m(static_cast<Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != static_cast<std::size_t>(cols)) throw ConfigError("ragged matrix in JSON");
        for (Index k = 0; k < cols; ++k) m(static_cast<Index>(i), k) = j[i][static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

Eigen::VectorXd json_vector(const Json& j) {
    Eigen::VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
    return v;
}

double bound(const Json& j, const char* key, double fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    return j[key].get<double>();
}

template <typename T>
T required(const Json& j, const char* key, const char* what) {
    if (!j.contains(key)) throw CaseError(std::string(what) + " is missing '" + key + "'");
    return j[key].get<T>();
}

Json optional_bound(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const ChangePointResult& result) {
    Json j;
    j["change_points"] = result.change_points;
    j["alpha"] = result.alpha;
    j["window"] = result.window;
    j["statistics"] = result.statistics;
    j["threshold"] = result.threshold;
    j["seed"] = result.seed;
    j["n_boot"] = result.n_boot;
    j["bootstrap_block"] = result.bootstrap_block;
    return j;
}

Json to_json(const VarModel& model) {
    Json j;
    j["order"] = model.order;
    Json coefficients = Json::array();
    for (const auto& w : model.coefficients) coefficients.push_back(matrix_rows(w));
    j["coefficients"] = std::move(coefficients);
    j["intercept"] = vector_json(model.intercept);
    j["mean"] = vector_json(model.mean);
    j["segment_length"] = model.segment_length;
    j["innovations"] = matrix_rows(model.residuals);
    return j;
}

VarModel var_model_from_json(const Json& j) {
    VarModel model;
    try {
        model.order = j.at("order").get<int>();
        model.intercept = json_vector(j.at("intercept"));
        model.mean = json_vector(j.at("mean"));
        const Index dim = model.intercept.size();
        for (const auto& w : j.at("coefficients")) model.coefficients.push_back(rows_matrix(w, dim));
        model.segment_length = j.at("segment_length").get<Index>();
        model.residuals = rows_matrix(j.at("innovations"), dim);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid VAR model JSON: ") + e.what());
    }
    if (static_cast<int>(model.coefficients.size()) != model.order || model.mean.size() != model.intercept.size()) {
        throw ConfigError("VAR model JSON is inconsistent with its order");
    }
    return model;
}

NetworkCase case_from_json(const Json& j) {
    NetworkCase c;
    try {
        for (const auto& b : j.at("buses")) c.buses.push_back(Bus{required<int>(b, "id", "bus"), bound(b, "V", 1.0)});
        for (const auto& l : j.at("lines")) {
            c.lines.push_back(Line{required<int>(l, "from", "line"), required<int>(l, "to", "line"),
                                   required<double>(l, "X", "line"), bound(l, "fmin", -kInf), bound(l, "fmax", kInf)});
        }
        for (const auto& g : j.at("generators")) {
            c.generators.push_back(Generator{required<int>(g, "bus", "generator"), bound(g, "a", 0.0), bound(g, "b", 0.0),
                                             bound(g, "gmin", 0.0), required<double>(g, "gmax", "generator"),
                                             bound(g, "ramp_dn", -kInf), bound(g, "ramp_up", kInf),
                                             g.value("wind", false)});
        }
        for (const auto& d : j.at("loads")) {
            Load load{required<int>(d, "bus", "load"), bound(d, "beta", 0.0), {}};
            const auto& demand = d.at("demand");
            if (demand.is_number()) load.demand.push_back(demand.get<double>());
            else load.demand = demand.get<std::vector<double>>();
            c.loads.push_back(std::move(load));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CaseError(std::string("invalid case JSON: ") + e.what());
    }
    c.validate();
    return c;
}

Json to_json(const NetworkCase& network) {
    Json j;
    j["buses"] = Json::array();
    for (const auto& b : network.buses) j["buses"].push_back({{"id", b.id}, {"V", b.voltage}});
    j["lines"] = Json::array();
    for (const auto& l : network.lines) {
        j["lines"].push_back({{"from", l.from}, {"to", l.to}, {"X", l.reactance},
                              {"fmin", optional_bound(l.flow_min)}, {"fmax", optional_bound(l.flow_max)}});
    }
    j["generators"] = Json::array();
    for (const auto& g : network.generators) {
        j["generators"].push_back({{"bus", g.bus}, {"a", g.a}, {"b", g.b}, {"gmin", g.gmin}, {"gmax", g.gmax},
                                   {"ramp_dn", optional_bound(g.ramp_down)}, {"ramp_up", optional_bound(g.ramp_up)},
                                   {"wind", g.wind}});
    }
    j["loads"] = Json::array();
    for (const auto& d : network.loads) j["loads"].push_back({{"bus", d.bus}, {"beta", d.bid}, {"demand", d.demand}});
    return j;
}

NetworkCase load_case_file(const std::string& path) { return case_from_json(read_json_file(path)); }

Json manifest_json(const SimulationBundle& bundle) {
    const auto& cfg = bundle.config;
    Json j;
    j["master_seed"] = bundle.master_seed;
    j["alpha"] = bundle.alpha;
    j["n_sims"] = bundle.simulations.size();
    j["length"] = bundle.decomposition.residual.length();
    j["components"] = bundle.decomposition.residual.names();
    j["change_points"] = bundle.change_points.change_points;

    Json segments = Json::array();
    Index lo = 0;
    for (std::size_t k = 0; k < bundle.plans.size(); ++k) {
        const auto& plan = bundle.plans[k];
        Json s;
        s["lo"] = lo;
        s["hi"] = lo + plan.length();
        s["method"] = plan.tag();
        s["var_order"] = plan.order;
        if (plan.method == SimMethod::Bootstrap) s["block_length"] = plan.block_length;
        if (plan.model) s["model"] = to_json(*plan.model);
        segments.push_back(std::move(s));
        lo += plan.length();
    }
    j["segments"] = std::move(segments);

    Json files = Json::array();
    for (std::size_t i = 0; i < bundle.simulations.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sim_%04zu.csv", i + 1);
        files.push_back(name);
    }
    j["simulations"] = std::move(files);
    j["seed_derivation"] = "segment k (0-based) of simulation i (1-based) uses derive_seed(master_seed, i, k); detection uses master_seed";

    Json c;
    c["loess"] = {{"span", cfg.loess.span}, {"degree", cfg.loess.degree},
                  {"robustness_iters", cfg.loess.robustness_iters}};
    c["period"] = cfg.period ? Json(*cfg.period) : Json(nullptr);
    c["window"] = cfg.window ? Json(*cfg.window) : Json(nullptr);
    const auto& spectral = cfg.detector.spectral;
    c["kernel"] = spectral.kernel.type == KernelType::Epanechnikov ? "epanechnikov" : "uniform";
    c["bandwidth_constant"] = spectral.bandwidth_constant;
    c["bandwidth"] = spectral.bandwidth ? Json(*spectral.bandwidth) : Json(nullptr);
    c["n_boot"] = cfg.detector.n_boot;
    c["min_separation"] = cfg.detector.min_separation ? Json(*cfg.detector.min_separation) : Json(nullptr);
    c["parametric_cutoff"] = cfg.segment.parametric_cutoff;
    c["max_order"] = cfg.segment.max_order ? Json(*cfg.segment.max_order) : Json(nullptr);
    c["order_criterion"] = cfg.segment.criterion == OrderCriterion::AIC ? "aic" : "bic";
    j["config"] = std::move(c);
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace nonstat

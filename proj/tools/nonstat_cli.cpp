#include "nonstat/changepoint.hpp"
#include "nonstat/csv.hpp"
#include "nonstat/decompose.hpp"
#include "nonstat/dispatch.hpp"
#include "nonstat/error.hpp"
#include "nonstat/parallel.hpp"
#include "nonstat/pipeline.hpp"
#include "nonstat/serialize.hpp"
#include "nonstat/svg.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace nonstat;

namespace {

struct LoessFlags {
    double span = 0.25;
    int degree = 2;
    int robustness = 0;
    std::optional<Index> period;

    void add(CLI::App* app) {
        app->add_option("--span", span, "Loess span as a fraction of the series")->check(CLI::Range(0.0, 1.0));
        app->add_option("--degree", degree, "Local polynomial degree")->check(CLI::IsMember({1, 2}));
        app->add_option("--robust-iters", robustness, "Bisquare robustness passes")->check(CLI::Range(0, 10));
        app->add_option("--period", period, "Seasonal period in samples")->check(CLI::PositiveNumber);
    }
    LoessConfig config() const { return {span, degree, robustness}; }
};

struct SpectralFlags {
    std::string kernel = "epanechnikov";
    double bandwidth_constant = 1.0;
    std::optional<double> bandwidth;
    Index n_boot = 200;
    std::optional<Index> min_separation;

    void add(CLI::App* app) {
        app->add_option("--kernel", kernel, "Smoothing kernel")->check(CLI::IsMember({"epanechnikov", "uniform"}));
        app->add_option("--bandwidth-const", bandwidth_constant, "Bandwidth constant c in h = c N^(-1/5)")
            ->check(CLI::PositiveNumber);
        app->add_option("--bandwidth", bandwidth, "Fixed bandwidth in radians")->check(CLI::Range(1e-6, 3.2));
        app->add_option("--n-boot", n_boot, "Bootstrap replicates for the null threshold")->check(CLI::Range(100, 100000));
        app->add_option("--min-separation", min_separation, "Exclusion radius around accepted points")
            ->check(CLI::NonNegativeNumber);
    }
    DetectorOptions options(std::uint64_t seed) const {
        DetectorOptions o;
        o.spectral.kernel.type = kernel == "uniform" ? KernelType::Uniform : KernelType::Epanechnikov;
        o.spectral.bandwidth_constant = bandwidth_constant;
        o.spectral.bandwidth = bandwidth;
        o.n_boot = n_boot;
        o.seed = seed;
        o.min_separation = min_separation;
        return o;
    }
};

std::string sibling(const std::string& path, const std::string& suffix) {
    const fs::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

MultivariateSeries single_column(const Eigen::VectorXd& values, const std::string& name) {
    return MultivariateSeries(Eigen::MatrixXd(values), {name});
}

void write_profile_csv(const std::string& path, const DeviationProfile& profile) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "tau,d_hat\n";
    for (std::size_t i = 0; i < profile.tau_values.size(); ++i)
        out << profile.tau_values[i] << ',' << format_double(profile.d_hat(static_cast<Index>(i))) << '\n';
}

void profile_svg(const std::string& path, const DeviationProfile& profile, const std::vector<Index>& cps) {
    // Pad to full length so the x axis matches the series.
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(profile.tau_values.empty() ? 1 : profile.tau_values.back() + profile.window);
    for (std::size_t i = 0; i < profile.tau_values.size(); ++i)
        padded(profile.tau_values[i] - 1) = profile.d_hat(static_cast<Index>(i));
    write_svg_file(path, line_chart_svg(single_column(padded, "d_hat"), cps, "deviation profile"));
}

int run_decompose(const std::string& input, const std::string& out, const LoessFlags& loess, bool plot) {
    const MultivariateSeries w = load_csv_file(input);
    const Decomposition d = decompose(w, loess.config(), loess.period);
    fs::create_directories(out);
    write_csv_file((fs::path(out) / "trend.csv").string(), d.trend);
    write_csv_file((fs::path(out) / "seasonal.csv").string(), d.seasonal);
    write_csv_file((fs::path(out) / "residual.csv").string(), d.residual);
    if (plot) {
        write_svg_file((fs::path(out) / "trend.svg").string(), line_chart_svg(d.trend, {}, "trend"));
        write_svg_file((fs::path(out) / "residual.svg").string(), line_chart_svg(d.residual, {}, "residual"));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Change point detection, wind simulation and economic dispatch for multivariate series"};
    app.require_subcommand(1);
    std::optional<std::size_t> threads;
    app.add_option("--threads", threads, "Worker threads (overrides NONSTAT_THREADS)")->check(CLI::Range(1, 1024));

    std::string input, output, plot;
    double alpha = 0.05;
    std::optional<Index> window;
    std::uint64_t seed = 0;
    LoessFlags loess;
    SpectralFlags spectral;

    auto add_plot = [&](CLI::App* sub) {
        sub->add_option("--emit-plot", plot, "Also write SVG charts")->check(CLI::IsMember({"svg"}));
    };

    auto* dec = app.add_subcommand("decompose", "Split a series into trend, seasonal and residual");
    dec->add_option("--input", input, "Input CSV")->required()->check(CLI::ExistingFile);
    dec->add_option("--out", output, "Output directory")->required();
    loess.add(dec);
    add_plot(dec);

    auto* det = app.add_subcommand("detect", "Detect change points in a residual series");
    std::string profile_out;
    det->add_option("--input", input, "Residual CSV")->required()->check(CLI::ExistingFile);
    det->add_option("--output", output, "Change point JSON")->required();
    det->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(1e-6, 0.999999));
    det->add_option("--window", window, "Spectral window N")->check(CLI::Range(2, 1 << 20));
    det->add_option("--seed", seed, "Bootstrap seed");
    det->add_option("--profile-out", profile_out, "Deviation profile CSV");
    spectral.add(det);
    add_plot(det);

    auto* sim = app.add_subcommand("simulate", "Simulate series that keep the detected segment structure");
    Index n_sims = 1;
    int cutoff = 5;
    std::optional<int> max_order;
    sim->add_option("--input", input, "Series CSV")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", output, "Output directory")->required();
    sim->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(1e-6, 0.999999));
    sim->add_option("--n", n_sims, "Number of simulations")->check(CLI::Range(1, 1000000));
    sim->add_option("--seed", seed, "Master seed");
    sim->add_option("--window", window, "Spectral window N")->check(CLI::Range(2, 1 << 20));
    sim->add_option("--var-cutoff", cutoff, "Orders below this use the VAR model")->check(CLI::Range(1, 100));
    sim->add_option("--max-order", max_order, "Largest VAR order searched")->check(CLI::Range(0, 100));
    loess.add(sim);
    spectral.add(sim);
    add_plot(sim);

    auto* dis = app.add_subcommand("dispatch", "Rolling-horizon economic dispatch driven by wind speeds");
    std::string case_path, wind_path, demand_path;
    PowerCurve curve;
    dis->add_option("--case", case_path, "Network case JSON")->required()->check(CLI::ExistingFile);
    dis->add_option("--wind", wind_path, "Wind speed CSV, one column per wind generator")->required()->check(CLI::ExistingFile);
    dis->add_option("--out", output, "Trace CSV")->required();
    dis->add_option("--demand", demand_path, "Demand CSV, one row per period and one column per load")
        ->check(CLI::ExistingFile);
    dis->add_option("--cut-in", curve.cut_in, "Cut-in speed (m/s)")->check(CLI::NonNegativeNumber);
    dis->add_option("--rated-speed", curve.rated_speed, "Rated speed (m/s)")->check(CLI::PositiveNumber);
    dis->add_option("--cut-out", curve.cut_out, "Cut-out speed (m/s)")->check(CLI::PositiveNumber);
    dis->add_option("--rated-power", curve.rated_power, "Rated power (MW)")->check(CLI::PositiveNumber);
    add_plot(dis);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    if (threads) set_max_threads(*threads);
    const bool svg = plot == "svg";

    try {
        if (dec->parsed()) return run_decompose(input, output, loess, svg);

        if (det->parsed()) {
            const MultivariateSeries r = load_csv_file(input);
            const Index n = window.value_or(default_window(r.length()));
            const ChangePointResult result = detect_changepoints(r, alpha, n, spectral.options(seed));
            write_json_file(output, to_json(result));
            if (!profile_out.empty()) write_profile_csv(profile_out, result.profile);
            if (svg) {
                write_svg_file(sibling(output, "_series.svg"), line_chart_svg(r, result.change_points, "residual"));
                profile_svg(sibling(output, "_profile.svg"), result.profile, result.change_points);
            }
            return 0;
        }

        if (sim->parsed()) {
            const MultivariateSeries w = load_csv_file(input);
            PipelineConfig cfg;
            cfg.loess = loess.config();
            cfg.period = loess.period;
            cfg.window = window;
            cfg.detector = spectral.options(seed);
            cfg.segment.parametric_cutoff = cutoff;
            cfg.segment.max_order = max_order;
            const SimulationBundle bundle = simulate_wind(w, alpha, n_sims, seed, cfg);
            write_bundle(bundle, output);
            if (svg) {
                const auto& cps = bundle.change_points.change_points;
                write_svg_file((fs::path(output) / "original_residual.svg").string(),
                               line_chart_svg(bundle.decomposition.residual, cps, "residual"));
                write_svg_file((fs::path(output) / "sim_0001.svg").string(),
                               line_chart_svg(bundle.simulations.front(), cps, "simulation 1"));
            }
            return 0;
        }

        if (dis->parsed()) {
            const NetworkCase network = load_case_file(case_path);
            const MultivariateSeries wind = load_csv_file(wind_path);
            const Eigen::MatrixXd demand = demand_path.empty() ? network.demand_profile(wind.length())
                                                               : load_csv_file(demand_path).values();
            const DispatchTrace trace = rolling_horizon(network, wind, curve, demand);
            std::ofstream out(output, std::ios::binary);
            if (!out) throw Error("cannot write " + output);
            write_trace_csv(out, trace);
            if (svg) {
                write_svg_file(sibling(output, "_generation.svg"),
                               line_chart_svg(single_column(trace.total_conventional, "total_conventional"), {},
                                              "total conventional generation"));
                write_svg_file(sibling(output, "_lmp_bus1.svg"),
                               line_chart_svg(single_column(trace.lmp.col(0), "pi_1"), {}, "LMP at bus 1"));
            }
            return 0;
        }
    } catch (const PeriodInfeasible& e) {
        std::cerr << "error: " << e.what() << " (" << e.partial().periods() << " periods solved)\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

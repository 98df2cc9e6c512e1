#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kwnr/config.hpp"
#include "kwnr/decay.hpp"
#include "kwnr/estimates.hpp"
#include "kwnr/run.hpp"

using namespace kwnr;

namespace {

RunConfig load_with_overrides(const std::string& config_path,
                              const std::string& out, int workers,
                              std::int64_t seed) {
    RunConfig cfg = load_config(config_path);
    if (!out.empty()) cfg.out_dir = out;
    if (workers > 0) cfg.workers = workers;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.validate();
    return cfg;
}

int cmd_run(const std::string& config_path, const std::string& resume,
            const std::string& out, int workers, std::int64_t seed) {
    auto cfg = load_with_overrides(config_path, out, workers, seed);
    auto sum = run_scenario(cfg, resume);
    std::cout << sum.to_json() << std::endl;
    return 0;
}

int cmd_verify_estimates(const std::string& config_path, int n_samples,
                         int workers, std::int64_t seed) {
    auto cfg = load_with_overrides(config_path, "", workers, seed);
    WeightSpec w = cfg.weight_spec();
    VelocityGrid grid(cfg.n_per_dim, cfg.v_max);
    double r_ball = 0.5 * cfg.v_max;
    std::uint64_t sd = cfg.seed;

    nlohmann::json out = nlohmann::json::array();
    if (cfg.model_kind == "landau") {
        LandauModel model(grid, cfg.gamma);
        out.push_back(nlohmann::json::parse(
            estimate_coercivity(model, n_samples, sd).to_json()));
        out.push_back(nlohmann::json::parse(
            verify_weighted_coercivity(model, w, r_ball, n_samples, sd + 1)
                .to_json()));
        out.push_back(nlohmann::json::parse(
            sample_trilinear_constant(model, w, n_samples, sd + 2).to_json()));
    } else {
        BoltzmannModel model(grid, cfg.gamma, cfg.s, cfg.theta_min);
        out.push_back(nlohmann::json::parse(
            estimate_coercivity(model, n_samples, sd, cfg.workers).to_json()));
        out.push_back(nlohmann::json::parse(
            verify_weighted_coercivity(model, w, r_ball, n_samples, sd + 1)
                .to_json()));
        out.push_back(nlohmann::json::parse(
            sample_trilinear_constant(model, w, n_samples, sd + 2, cfg.workers)
                .to_json()));
    }

    // Banach-algebra sanity sweep on random lattice sequences
    std::mt19937_64 rng(sd + 3);
    std::normal_distribution<double> g(0.0, 1.0);
    int violations = 0;
    const int pairs = 1000;
    for (int trial = 0; trial < pairs; ++trial) {
        std::vector<Cplx> a(16), b(16);
        for (auto& z : a) z = Cplx{g(rng), g(rng)};
        for (auto& z : b) z = Cplx{g(rng), g(rng)};
        auto [lhs, rhs] = wiener_convolution_check(a, b);
        if (lhs > rhs * (1.0 + 1e-12)) ++violations;
    }
    out.push_back({{"inequality", "wiener_algebra"},
                   {"n_samples", pairs},
                   {"violations", violations},
                   {"pass", violations == 0}});

    std::cout << out.dump(2) << std::endl;
    for (const auto& j : out)
        if (j.contains("pass") && !j["pass"].get<bool>()) return 1;
    return 0;
}

std::vector<std::pair<double, double>> read_norm_series(
    const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty CSV: " + csv_path);
    std::vector<std::pair<double, double>> series;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string t_str, n_str;
        if (!std::getline(row, t_str, ',') || !std::getline(row, n_str, ','))
            continue;
        series.emplace_back(std::stod(t_str), std::stod(n_str));
    }
    return series;
}

int cmd_fit_decay(const std::string& csv_path, double t_lo, double t_hi) {
    auto series = read_norm_series(csv_path);
    if (series.empty()) throw std::runtime_error("no samples in " + csv_path);
    double t_final = series.back().first;
    auto window = (t_lo >= 0.0 && t_hi > t_lo)
                      ? std::pair<double, double>{t_lo, t_hi}
                      : default_fit_window(t_final);
    auto fit = fit_subexponential(series, window);
    nlohmann::json j{{"c", fit.c},
                     {"lambda", fit.lambda},
                     {"kappa", fit.kappa},
                     {"rss", fit.rss},
                     {"window", {fit.window.first, fit.window.second}},
                     {"flagged", fit.flagged},
                     {"csv", csv_path}};
    std::cout << j.dump(2) << std::endl;
    return 0;
}

int cmd_kappa(const std::string& config_path) {
    RunConfig cfg = load_config(config_path);
    WeightSpec w = cfg.weight_spec();
    double k = kappa_theory(w.model_kind, cfg.gamma, cfg.s, w);
    nlohmann::json j{{"model_kind", cfg.model_kind},
                     {"gamma", cfg.gamma},
                     {"q", cfg.q},
                     {"theta", cfg.theta},
                     {"kappa", k}};
    if (cfg.model_kind == "boltzmann") j["s"] = cfg.s;
    std::cout << j.dump(2) << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral torus / channel kinetic solver and estimate "
                 "verification"};
    app.require_subcommand(1);

    std::string config_path, resume, out, csv_path;
    int workers = 0;
    std::int64_t seed = -1;
    int n_samples = 1000;
    double t_lo = -1.0, t_hi = -1.0;

    auto* run = app.add_subcommand("run", "execute a configured run");
    run->add_option("--config", config_path, "run configuration file")
        ->required();
    run->add_option("--resume", resume, "checkpoint to resume from");
    run->add_option("--out", out, "override output.dir");
    run->add_option("--workers", workers, "override run.workers");
    run->add_option("--seed", seed, "override run.seed");

    auto* ver = app.add_subcommand("verify-estimates",
                                   "sample the functional inequalities");
    ver->add_option("--config", config_path, "model configuration file")
        ->required();
    ver->add_option("--samples", n_samples, "samples per inequality");
    ver->add_option("--workers", workers, "override run.workers");
    ver->add_option("--seed", seed, "override run.seed");

    auto* fit = app.add_subcommand("fit-decay",
                                   "fit the sub-exponential envelope of a "
                                   "run CSV");
    fit->add_option("--csv", csv_path, "run.csv from a finished run")
        ->required();
    fit->add_option("--t-lo", t_lo, "fit window start");
    fit->add_option("--t-hi", t_hi, "fit window end");

    auto* kap = app.add_subcommand("kappa",
                                   "theoretical decay exponent for a config");
    kap->add_option("--config", config_path, "model configuration file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, resume, out, workers,
                                          seed);
        if (ver->parsed())
            return cmd_verify_estimates(config_path, n_samples, workers, seed);
        if (fit->parsed()) return cmd_fit_decay(csv_path, t_lo, t_hi);
        if (kap->parsed()) return cmd_kappa(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

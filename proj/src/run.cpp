#include "kwnr/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "kwnr/channel.hpp"
#include "kwnr/checkpoint.hpp"
#include "kwnr/estimates.hpp"
#include "kwnr/torus_solver.hpp"

namespace kwnr {

namespace {

using nlohmann::json;

std::ofstream open_csv(const std::string& path, bool channel) {
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot write " + path);
    csv << std::setprecision(17);
    csv << "t,norm_L1k_L2v,weighted_norm,dnorm_cumulative,mass,mom_x,mom_y,"
           "mom_z,energy,";
    if (channel) csv << "sym_defect,";
    csv << "min_F\n";
    return csv;
}

/// min over velocity nodes of mu + sqrt(mu) Re f(x = 0, v); the physical
/// density stays nonnegative as long as this monitor does.
double torus_min_f(const SpectralField& f) {
    const VelocityGrid& g = f.grid();
    auto mu = g.maxwellian();
    auto smu = g.sqrt_maxwellian();
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        double sum = 0.0;
        for (std::size_t m = 0; m < f.num_stored(); ++m) {
            bool zero = f.keys()[m] == KPoint{0, 0, 0};
            sum += (zero ? 1.0 : 2.0) * f.mode(m)[p].real();
        }
        mn = std::min(mn, mu[p].real() + smu[p].real() * sum);
    }
    return mn;
}

double channel_min_f(const ChannelState& st) {
    const VelocityGrid& g = st.grid();
    auto mu = g.maxwellian();
    auto smu = g.sqrt_maxwellian();
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < st.n_x1(); ++i)
        for (std::size_t p = 0; p < g.num_nodes(); ++p) {
            double sum = 0.0;
            for (std::size_t m = 0; m < st.num_stored(); ++m) {
                bool zero = st.keys()[m][0] == 0 && st.keys()[m][1] == 0;
                sum += (zero ? 1.0 : 2.0) *
                       st.slab(m)[static_cast<std::size_t>(i)][p].real();
            }
            mn = std::min(mn, mu[p].real() + smu[p].real() * sum);
        }
    return mn;
}

double torus_dnorm_total(const SpectralField& f, const WeightSpec& w,
                         const LandauModel* landau) {
    if (!landau) return 0.0;  // the Boltzmann D-norm costs a full sweep
    double total = 0.0;
    for (std::size_t m = 0; m < f.num_stored(); ++m) {
        bool zero = f.keys()[m] == KPoint{0, 0, 0};
        total += (zero ? 1.0 : 2.0) * landau->d_norm_sq(f.mode(m), w);
    }
    return total;
}

struct ChannelMacros {
    double mass = 0.0, mx = 0.0, my = 0.0, mz = 0.0, energy = 0.0;
};

ChannelMacros channel_macros(const ChannelState& st) {
    const VelocityGrid& g = st.grid();
    auto smu = g.sqrt_maxwellian();
    int k0 = st.stored_index({0, 0});
    ChannelMacros out;
    if (k0 < 0) return out;
    double h = st.x1_spacing();
    for (int i = 0; i < st.n_x1(); ++i) {
        const auto& f = st.slab(static_cast<std::size_t>(k0))
                            [static_cast<std::size_t>(i)];
        for (std::size_t p = 0; p < g.num_nodes(); ++p) {
            double d = h * g.quad_weights()[p] * smu[p].real() * f[p].real();
            const Vec3& v = g.nodes()[p];
            out.mass += d;
            out.mx += d * v[0];
            out.my += d * v[1];
            out.mz += d * v[2];
            out.energy += d * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        }
    }
    return out;
}

double channel_weighted_norm(const ChannelState& st, const WeightSpec& w) {
    const VelocityGrid& g = st.grid();
    auto wf = weight_field(g, w);
    double total = 0.0;
    for (std::size_t m = 0; m < st.num_stored(); ++m) {
        bool zero = st.keys()[m][0] == 0 && st.keys()[m][1] == 0;
        double sup = 0.0;
        for (int i = 0; i < st.n_x1(); ++i) {
            const auto& f = st.slab(m)[static_cast<std::size_t>(i)];
            double sq = 0.0;
            for (std::size_t p = 0; p < g.num_nodes(); ++p)
                sq += g.quad_weights()[p] * std::norm(wf[p] * f[p]);
            sup = std::max(sup, std::sqrt(sq));
        }
        total += (zero ? 1.0 : 2.0) * sup;
    }
    return total;
}

double channel_dnorm_total(const ChannelState& st, const WeightSpec& w,
                           const LandauModel& model) {
    double total = 0.0;
    double h = st.x1_spacing();
    for (std::size_t m = 0; m < st.num_stored(); ++m) {
        bool zero = st.keys()[m][0] == 0 && st.keys()[m][1] == 0;
        double sq = 0.0;
        for (int i = 0; i < st.n_x1(); ++i)
            sq += model.d_norm_sq(st.slab(m)[static_cast<std::size_t>(i)], w);
        total += (zero ? 1.0 : 2.0) * h * sq;
    }
    return total;
}

void maybe_fit(RunSummary& sum) {
    const RunConfig& cfg = sum.cfg;
    std::pair<double, double> window =
        (cfg.fit_t_lo >= 0.0 && cfg.fit_t_hi > cfg.fit_t_lo)
            ? std::pair<double, double>{cfg.fit_t_lo, cfg.fit_t_hi}
            : default_fit_window(sum.t_final);
    try {
        sum.fit = fit_subexponential(sum.norm_series, window);
        sum.has_fit = true;
    } catch (const std::exception&) {
        sum.has_fit = false;  // too few samples or degenerate series
    }
}

RunSummary run_torus(const RunConfig& cfg, const std::string& resume_path) {
    VelocityGrid grid(cfg.n_per_dim, cfg.v_max);
    std::unique_ptr<LandauModel> landau;
    std::unique_ptr<BoltzmannModel> boltz;
    if (cfg.model_kind == "landau")
        landau = std::make_unique<LandauModel>(grid, cfg.gamma);
    else
        boltz = std::make_unique<BoltzmannModel>(grid, cfg.gamma, cfg.s,
                                                 cfg.theta_min);
    WeightSpec w = cfg.weight_spec();

    double t0 = 0.0;
    std::uint64_t step0 = 0;
    SpectralField field =
        resume_path.empty()
            ? init_field(cfg.preset, cfg.amplitude, cfg.k_max, grid, cfg.seed)
            : load_checkpoint_torus(resume_path, grid, t0, step0);

    TorusOptions opt;
    opt.dt = cfg.dt;
    opt.scheme = parse_scheme(cfg.scheme);
    opt.nonlinear = cfg.nonlinear;
    opt.conserve_correction = cfg.conserve_correction;
    opt.ball_radius = cfg.ball_radius;
    std::unique_ptr<TorusSolver> solver =
        landau ? std::make_unique<TorusSolver>(*landau, opt)
               : std::make_unique<TorusSolver>(*boltz, opt);

    RunSummary sum;
    sum.cfg = cfg;
    sum.t_start = t0;
    sum.csv_path = cfg.out_dir + "/run.csv";
    sum.summary_path = cfg.out_dir + "/summary.json";
    sum.checkpoint_path = cfg.out_dir + "/checkpoint.kwnr";
    auto csv = open_csv(sum.csv_path, false);

    auto dnorm_fn = [&](const VelocityField& f) {
        return landau ? landau->d_norm_sq(f, w) : 0.0;
    };
    NormAccumulators accum;
    auto cons0 = conservation_functionals(field);
    sum.initial_norm = field.l1k_l2v();

    double dnorm_cum = 0.0, prev_d = 0.0, prev_t = t0;
    bool have_prev = false;
    auto record = [&](double t) {
        double norm = field.l1k_l2v();
        double wnorm = field.l1k_l2v_weighted(w);
        double d = torus_dnorm_total(field, w, landau.get());
        if (have_prev) dnorm_cum += 0.5 * (t - prev_t) * (prev_d + d);
        prev_d = d;
        prev_t = t;
        have_prev = true;
        auto c = conservation_functionals(field);
        double minf = torus_min_f(field);
        csv << t << ',' << norm << ',' << wnorm << ',' << dnorm_cum << ','
            << c.mass << ',' << c.momentum[0] << ',' << c.momentum[1] << ','
            << c.momentum[2] << ',' << c.energy << ',' << minf << '\n';
        accum.record(field, t, w, dnorm_fn);
        sum.norm_series.emplace_back(t, norm);
        double ho = high_order_norm(field, cfg.high_order_m, w);
        sum.high_order_final = ho;
        sum.high_order_max = std::max(sum.high_order_max, ho);
        sum.min_f_final = minf;
        sum.mass_drift = std::abs(c.mass - cons0.mass);
        sum.momentum_drift = std::max(
            {std::abs(c.momentum[0] - cons0.momentum[0]),
             std::abs(c.momentum[1] - cons0.momentum[1]),
             std::abs(c.momentum[2] - cons0.momentum[2])});
        sum.energy_drift = std::abs(c.energy - cons0.energy);
    };

    auto wall0 = std::chrono::steady_clock::now();
    record(t0);
    std::uint64_t remaining = static_cast<std::uint64_t>(
        std::llround(std::max(0.0, (cfg.t_final - t0) / cfg.dt)));
    for (std::uint64_t i = 1; i <= remaining; ++i) {
        solver->step(field);
        double t = t0 + static_cast<double>(i) * cfg.dt;
        std::uint64_t step = step0 + i;
        if (step % static_cast<std::uint64_t>(cfg.record_every) == 0 ||
            i == remaining)
            record(t);
        if (cfg.checkpoint_every > 0 &&
            step % static_cast<std::uint64_t>(cfg.checkpoint_every) == 0)
            save_checkpoint(sum.checkpoint_path, field, t, step);
    }
    sum.steps = remaining;
    sum.t_final = t0 + static_cast<double>(remaining) * cfg.dt;
    save_checkpoint(sum.checkpoint_path, field, sum.t_final, step0 + remaining);
    sum.final_norm = field.l1k_l2v();
    sum.x_t = accum.x_t();
    sum.x_t_weighted = accum.x_t_weighted();
    sum.dissipation = accum.dissipation();
    sum.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - wall0)
                           .count();
    maybe_fit(sum);
    return sum;
}

RunSummary run_channel(const RunConfig& cfg, const std::string& resume_path) {
    VelocityGrid grid(cfg.n_per_dim, cfg.v_max);
    LandauModel model(grid, cfg.gamma);
    WeightSpec w = cfg.weight_spec();

    double t0 = 0.0;
    std::uint64_t step0 = 0;
    ChannelState state =
        resume_path.empty()
            ? channel_init(cfg.preset, cfg.amplitude, cfg.n_x1, cfg.kbar_max,
                           grid, cfg.seed)
            : load_checkpoint_channel(resume_path, grid, t0, step0);

    ChannelOptions opt;
    opt.dt = cfg.dt;
    opt.bc = (cfg.bc == "inflow") ? ChannelBC::Inflow : ChannelBC::Specular;
    opt.ball_radius = cfg.ball_radius;
    ChannelSolver solver(model, opt);
    BoundaryData data = make_boundary_preset(
        cfg.boundary_preset, cfg.boundary_amplitude, cfg.kbar_max, grid);
    const BoundaryData* data_ptr =
        (opt.bc == ChannelBC::Inflow) ? &data : nullptr;

    RunSummary sum;
    sum.cfg = cfg;
    sum.t_start = t0;
    sum.csv_path = cfg.out_dir + "/run.csv";
    sum.summary_path = cfg.out_dir + "/summary.json";
    sum.checkpoint_path = cfg.out_dir + "/checkpoint.kwnr";
    auto csv = open_csv(sum.csv_path, true);

    ChannelEnergyAccum energy(model, w);
    sum.initial_norm = state.l1kbar_norm();

    double dnorm_cum = 0.0, prev_d = 0.0, prev_t = t0;
    bool have_prev = false;
    ChannelMacros m0 = channel_macros(state);
    auto record = [&](double t) {
        double norm = state.l1kbar_norm();
        double wnorm = channel_weighted_norm(state, w);
        double d = channel_dnorm_total(state, w, model);
        if (have_prev) dnorm_cum += 0.5 * (t - prev_t) * (prev_d + d);
        prev_d = d;
        prev_t = t;
        have_prev = true;
        ChannelMacros m = channel_macros(state);
        double sd = symmetry_defect(state);
        double minf = channel_min_f(state);
        csv << t << ',' << norm << ',' << wnorm << ',' << dnorm_cum << ','
            << m.mass << ',' << m.mx << ',' << m.my << ',' << m.mz << ','
            << m.energy << ',' << sd << ',' << minf << '\n';
        energy.record(state, t);
        sum.norm_series.emplace_back(t, norm);
        sum.min_f_final = minf;
        sum.sym_defect_final = sd;
        sum.mass_drift = std::abs(m.mass - m0.mass);
        sum.momentum_drift =
            std::max({std::abs(m.mx - m0.mx), std::abs(m.my - m0.my),
                      std::abs(m.mz - m0.mz)});
        sum.energy_drift = std::abs(m.energy - m0.energy);
    };

    auto wall0 = std::chrono::steady_clock::now();
    record(t0);
    std::uint64_t remaining = static_cast<std::uint64_t>(
        std::llround(std::max(0.0, (cfg.t_final - t0) / cfg.dt)));
    for (std::uint64_t i = 1; i <= remaining; ++i) {
        double t = t0 + static_cast<double>(i - 1) * cfg.dt;
        solver.step(state, t, data_ptr);
        t += cfg.dt;
        std::uint64_t step = step0 + i;
        if (step % static_cast<std::uint64_t>(cfg.record_every) == 0 ||
            i == remaining)
            record(t);
        if (cfg.checkpoint_every > 0 &&
            step % static_cast<std::uint64_t>(cfg.checkpoint_every) == 0)
            save_checkpoint(sum.checkpoint_path, state, t, step);
    }
    sum.steps = remaining;
    sum.t_final = t0 + static_cast<double>(remaining) * cfg.dt;
    save_checkpoint(sum.checkpoint_path, state, sum.t_final, step0 + remaining);
    sum.final_norm = state.l1kbar_norm();
    auto [et, dt_] = energy.totals();
    sum.e_t = et;
    sum.d_t = dt_;
    sum.x_t = et;  // the sup part doubles as the channel X functional
    sum.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - wall0)
                           .count();
    maybe_fit(sum);
    return sum;
}

}  // namespace

std::string RunSummary::to_json() const {
    json j;
    j["model_kind"] = cfg.model_kind;
    j["gamma"] = cfg.gamma;
    if (cfg.model_kind == "boltzmann") j["s"] = cfg.s;
    j["domain"] = cfg.domain;
    j["n_per_dim"] = cfg.n_per_dim;
    j["v_max"] = cfg.v_max;
    j["ball_radius"] = cfg.ball_radius;
    j["weight_q"] = cfg.q;
    j["weight_theta"] = cfg.theta;
    j["scheme"] = cfg.scheme;
    j["nonlinear"] = cfg.nonlinear;
    j["dt"] = cfg.dt;
    j["seed"] = cfg.seed;
    j["steps"] = steps;
    j["t_start"] = t_start;
    j["t_final"] = t_final;
    j["wall_seconds"] = wall_seconds;
    j["initial_norm"] = initial_norm;
    j["final_norm"] = final_norm;
    j["x_t"] = x_t;
    j["x_t_weighted"] = x_t_weighted;
    j["dissipation"] = dissipation;
    j["high_order_final"] = high_order_final;
    j["high_order_max"] = high_order_max;
    j["mass_drift"] = mass_drift;
    j["momentum_drift"] = momentum_drift;
    j["energy_drift"] = energy_drift;
    j["min_f_final"] = min_f_final;
    if (cfg.domain == "channel") {
        j["sym_defect_final"] = sym_defect_final;
        j["e_t"] = e_t;
        j["d_t"] = d_t;
    }
    if (has_fit) {
        j["fit"] = {{"c", fit.c},
                    {"lambda", fit.lambda},
                    {"kappa", fit.kappa},
                    {"rss", fit.rss},
                    {"window", {fit.window.first, fit.window.second}},
                    {"flagged", fit.flagged}};
    }
    j["csv"] = csv_path;
    j["checkpoint"] = checkpoint_path;
    return j.dump(2);
}

RunSummary run_scenario(const RunConfig& cfg, const std::string& resume_path) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    RunSummary sum = (cfg.domain == "channel") ? run_channel(cfg, resume_path)
                                               : run_torus(cfg, resume_path);
    std::ofstream js(sum.summary_path);
    if (!js) throw std::runtime_error("cannot write " + sum.summary_path);
    js << sum.to_json() << '\n';
    return sum;
}

}  // namespace kwnr

#include "kwnr/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "kwnr/macro_micro.hpp"

namespace kwnr {

std::vector<KBar> kbar_keys(int kbar_max) {
    std::vector<KBar> keys;
    for (int k0 = -kbar_max; k0 <= kbar_max; ++k0)
        for (int k1 = -kbar_max; k1 <= kbar_max; ++k1) {
            KBar k{k0, k1};
            if (kbar_stored(k)) keys.push_back(k);
        }
    return keys;
}

ChannelState::ChannelState(const VelocityGrid& grid, int n_x1, int kbar_max)
    : grid_(&grid), n_x1_(n_x1), kbar_max_(kbar_max) {
    if (n_x1 < 4) throw std::invalid_argument("n_x1 must be at least 4");
    if (kbar_max < 0) throw std::invalid_argument("kbar_max must be >= 0");
    keys_ = kbar_keys(kbar_max);
    slabs_.assign(keys_.size(),
                  std::vector<VelocityField>(
                      static_cast<std::size_t>(n_x1),
                      VelocityField(grid.num_nodes())));
}

int ChannelState::stored_index(const KBar& k) const {
    for (std::size_t i = 0; i < keys_.size(); ++i)
        if (keys_[i] == k) return static_cast<int>(i);
    return -1;
}

bool ChannelState::in_truncation(const KBar& k) const {
    return std::abs(k[0]) <= kbar_max_ && std::abs(k[1]) <= kbar_max_;
}

double ChannelState::conjugate_defect() const {
    int i0 = stored_index({0, 0});
    if (i0 < 0) return 0.0;
    double d = 0.0;
    for (const auto& f : slabs_[static_cast<std::size_t>(i0)])
        for (const Cplx& z : f.values) d = std::max(d, std::abs(z.imag()));
    return d;
}

void ChannelState::enforce_k0_real() {
    int i0 = stored_index({0, 0});
    if (i0 < 0) return;
    for (auto& f : slabs_[static_cast<std::size_t>(i0)])
        for (Cplx& z : f.values) z = Cplx{z.real(), 0.0};
}

double ChannelState::l1kbar_norm() const {
    double total = 0.0;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        double sup = 0.0;
        for (const auto& f : slabs_[i])
            sup = std::max(sup, grid_->norm_l2(f));
        double mult = (keys_[i][0] == 0 && keys_[i][1] == 0) ? 1.0 : 2.0;
        total += mult * sup;
    }
    return total;
}

VelocityField BoundaryData::minus_at(double t, std::size_t kidx) const {
    if (minus.size() == 1 || dt <= 0.0) return minus.at(0).at(kidx);
    double s = std::min(std::max(t / dt, 0.0),
                        static_cast<double>(minus.size() - 1));
    std::size_t j = std::min(static_cast<std::size_t>(s), minus.size() - 2);
    double a = s - static_cast<double>(j);
    const VelocityField& lo = minus[j].at(kidx);
    const VelocityField& hi = minus[j + 1].at(kidx);
    VelocityField out(lo.size());
    for (std::size_t p = 0; p < lo.size(); ++p)
        out[p] = (1.0 - a) * lo[p] + a * hi[p];
    return out;
}

VelocityField BoundaryData::plus_at(double t, std::size_t kidx) const {
    if (plus.size() == 1 || dt <= 0.0) return plus.at(0).at(kidx);
    double s = std::min(std::max(t / dt, 0.0),
                        static_cast<double>(plus.size() - 1));
    std::size_t j = std::min(static_cast<std::size_t>(s), plus.size() - 2);
    double a = s - static_cast<double>(j);
    const VelocityField& lo = plus[j].at(kidx);
    const VelocityField& hi = plus[j + 1].at(kidx);
    VelocityField out(lo.size());
    for (std::size_t p = 0; p < lo.size(); ++p)
        out[p] = (1.0 - a) * lo[p] + a * hi[p];
    return out;
}

BoundaryData make_boundary_preset(const std::string& preset, double amplitude,
                                  int kbar_max, const VelocityGrid& grid) {
    auto keys = kbar_keys(kbar_max);
    BoundaryData data;
    data.dt = 0.0;
    data.minus.assign(1, std::vector<VelocityField>(
                             keys.size(), VelocityField(grid.num_nodes())));
    data.plus = data.minus;
    if (preset == "zero") return data;
    if (preset == "maxwell_pulse") {
        auto smu = grid.sqrt_maxwellian();
        std::size_t k0 = 0;
        while (k0 < keys.size() && !(keys[k0][0] == 0 && keys[k0][1] == 0)) ++k0;
        for (std::size_t p = 0; p < grid.num_nodes(); ++p) {
            double v1 = grid.nodes()[p][0];
            if (v1 > 0.0) data.minus[0][k0][p] = amplitude * smu[p];
            if (v1 < 0.0) data.plus[0][k0][p] = amplitude * smu[p];
        }
        return data;
    }
    throw std::invalid_argument("unknown boundary preset: " + preset);
}

namespace {

// index of the node with v1 negated (axis 0 reversal on the symmetric lattice)
std::size_t mirror_node(const VelocityGrid& g, std::size_t p) {
    int n = g.n_per_dim();
    std::size_t plane = static_cast<std::size_t>(n) * n;
    std::size_t ix = p / plane;
    return (static_cast<std::size_t>(n) - 1 - ix) * plane + p % plane;
}

}  // namespace

ChannelState channel_init(const std::string& preset, double amplitude,
                          int n_x1, int kbar_max, const VelocityGrid& grid,
                          std::uint64_t seed) {
    ChannelState state(grid, n_x1, kbar_max);
    const auto& nodes = grid.nodes();
    auto smu = grid.sqrt_maxwellian();
    const double pi = std::acos(-1.0);

    if (preset == "symmetric_micro") {
        // phi_e even in v1, phi_o odd in v1; paired with even / odd x1
        // profiles so f(-x1, -v1, vbar) = f(x1, v1, vbar) holds exactly
        VelocityField phi_e(grid.num_nodes()), phi_o(grid.num_nodes());
        for (std::size_t p = 0; p < grid.num_nodes(); ++p) {
            phi_e[p] = nodes[p][1] * nodes[p][2] * smu[p];
            phi_o[p] = nodes[p][0] * nodes[p][1] * smu[p];
        }
        phi_e = micro_part(grid, phi_e);
        phi_o = micro_part(grid, phi_o);
        for (std::size_t i = 0; i < state.keys().size(); ++i) {
            const KBar& k = state.keys()[i];
            Cplx coef;
            if (k[0] == 0 && k[1] == 0)
                coef = Cplx{1.0, 0.0};
            else if (k == KBar{1, 0})
                coef = Cplx{0.3, 0.2};
            else
                continue;
            for (int ix = 0; ix < n_x1; ++ix) {
                double x = state.x1_node(ix);
                Cplx ce = coef * amplitude * std::cos(0.5 * pi * x);
                Cplx co = coef * amplitude * std::sin(pi * x);
                auto& f = state.slab(i)[static_cast<std::size_t>(ix)];
                for (std::size_t p = 0; p < grid.num_nodes(); ++p)
                    f[p] = ce * phi_e[p] + co * phi_o[p];
            }
        }
        return state;
    }

    if (preset == "random") {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        // three smooth x1 harmonics (vanishing at the walls) times random
        // microscopic velocity profiles
        for (std::size_t i = 0; i < state.keys().size(); ++i) {
            bool self = state.keys()[i][0] == 0 && state.keys()[i][1] == 0;
            for (int m = 1; m <= 3; ++m) {
                VelocityField phi(grid.num_nodes());
                for (std::size_t p = 0; p < grid.num_nodes(); ++p) {
                    const Vec3& v = nodes[p];
                    double poly = gauss(rng) + gauss(rng) * v[0] +
                                  gauss(rng) * v[1] * v[2] +
                                  gauss(rng) * v[0] * v[1] +
                                  gauss(rng) * (v[0] * v[0] - v[2] * v[2]);
                    phi[p] = poly * smu[p];
                }
                phi = micro_part(grid, phi);
                double nrm = grid.norm_l2(phi);
                Cplx coef{gauss(rng), self ? 0.0 : gauss(rng)};
                coef *= amplitude / (nrm > 0.0 ? nrm : 1.0) / 3.0;
                for (int ix = 0; ix < n_x1; ++ix) {
                    double x = state.x1_node(ix);
                    Cplx c = coef * std::sin(0.5 * m * pi * (x + 1.0));
                    auto& f = state.slab(i)[static_cast<std::size_t>(ix)];
                    for (std::size_t p = 0; p < grid.num_nodes(); ++p)
                        f[p] += c * phi[p];
                }
            }
        }
        return state;
    }

    throw std::invalid_argument("unknown channel preset: " + preset);
}

double symmetry_defect(const ChannelState& state) {
    const VelocityGrid& g = state.grid();
    double d = 0.0;
    for (std::size_t i = 0; i < state.num_stored(); ++i) {
        const auto& slab = state.slab(i);
        for (int ix = 0; ix < state.n_x1(); ++ix) {
            const auto& f = slab[static_cast<std::size_t>(ix)];
            const auto& fm =
                slab[static_cast<std::size_t>(state.n_x1() - 1 - ix)];
            for (std::size_t p = 0; p < g.num_nodes(); ++p)
                d = std::max(d, std::abs(f[p] - fm[mirror_node(g, p)]));
        }
    }
    return d;
}

VelocityField specular_ghost(const std::vector<VelocityField>& slab,
                             const VelocityGrid& grid, bool right_wall,
                             int layer) {
    std::size_t interior =
        right_wall ? slab.size() - static_cast<std::size_t>(layer)
                   : static_cast<std::size_t>(layer - 1);
    const VelocityField& src = slab.at(interior);
    VelocityField out(grid.num_nodes());
    for (std::size_t p = 0; p < grid.num_nodes(); ++p)
        out[p] = src[mirror_node(grid, p)];
    return out;
}

ChannelSolver::ChannelSolver(const LandauModel& model,
                             const ChannelOptions& opt)
    : model_(&model), grid_(model.grid()), opt_(opt) {
    if (opt_.dt <= 0.0) throw std::invalid_argument("dt must be positive");
    std::size_t n = grid_.num_nodes();
    if (opt_.ball_radius > 0.0) {
        mask_.assign(n, 0);
        double r2 = opt_.ball_radius * opt_.ball_radius + 1e-12;
        for (std::size_t p = 0; p < n; ++p) {
            const Vec3& v = grid_.nodes()[p];
            if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= r2) {
                mask_[p] = 1;
                keep_.push_back(p);
            }
        }
    } else {
        keep_.resize(n);
        for (std::size_t p = 0; p < n; ++p) keep_[p] = p;
    }
}

void ChannelSolver::apply_mask(VelocityField& f) const {
    if (mask_.empty()) return;
    for (std::size_t p = 0; p < f.size(); ++p)
        if (!mask_[p]) f[p] = Cplx{0.0, 0.0};
}

void ChannelSolver::transport_substep(ChannelState& state, double tau,
                                      double t,
                                      const BoundaryData* data) const {
    if (opt_.bc == ChannelBC::Inflow && data == nullptr)
        throw std::invalid_argument("inflow runs require boundary data");

    int nx = state.n_x1();
    double h = state.x1_spacing();
    std::size_t nv = grid_.num_nodes();

    // -v1 d_x1 applied to one slab; ghosts gl / gr hold the wall condition
    auto rhs_slab = [&](const std::vector<VelocityField>& slab,
                        const VelocityField& gl, const VelocityField& gr,
                        std::vector<VelocityField>& out) {
        for (std::size_t p = 0; p < nv; ++p) {
            if (!mask_.empty() && !mask_[p]) {
                for (int i = 0; i < nx; ++i)
                    out[static_cast<std::size_t>(i)][p] = Cplx{0.0, 0.0};
                continue;
            }
            double v1 = grid_.nodes()[p][0];
            if (v1 > 0.0) {
                // upstream is the left wall
                out[0][p] = -v1 * (slab[0][p] - gl[p]) / h;
                out[1][p] = -v1 *
                            (3.0 * slab[1][p] - 4.0 * slab[0][p] + gl[p]) /
                            (2.0 * h);
                for (int i = 2; i < nx; ++i)
                    out[static_cast<std::size_t>(i)][p] =
                        -v1 *
                        (3.0 * slab[static_cast<std::size_t>(i)][p] -
                         4.0 * slab[static_cast<std::size_t>(i - 1)][p] +
                         slab[static_cast<std::size_t>(i - 2)][p]) /
                        (2.0 * h);
            } else {
                std::size_t last = static_cast<std::size_t>(nx - 1);
                out[last][p] = -v1 * (gr[p] - slab[last][p]) / h;
                out[last - 1][p] =
                    -v1 *
                    (-3.0 * slab[last - 1][p] + 4.0 * slab[last][p] - gr[p]) /
                    (2.0 * h);
                for (int i = 0; i < nx - 2; ++i)
                    out[static_cast<std::size_t>(i)][p] =
                        -v1 *
                        (-3.0 * slab[static_cast<std::size_t>(i)][p] +
                         4.0 * slab[static_cast<std::size_t>(i + 1)][p] -
                         slab[static_cast<std::size_t>(i + 2)][p]) /
                        (2.0 * h);
            }
        }
    };

    auto ghosts = [&](const std::vector<VelocityField>& slab, std::size_t ki,
                      double time, VelocityField& gl, VelocityField& gr) {
        if (opt_.bc == ChannelBC::Specular) {
            gl = specular_ghost(slab, grid_, /*right_wall=*/false, 1);
            gr = specular_ghost(slab, grid_, /*right_wall=*/true, 1);
        } else {
            gl = data->minus_at(time, ki);
            gr = data->plus_at(time, ki);
        }
        apply_mask(gl);
        apply_mask(gr);
    };

    for (std::size_t ki = 0; ki < state.num_stored(); ++ki) {
        auto& slab = state.slab(ki);
        std::vector<VelocityField> k1(slab.size(), VelocityField(nv));
        std::vector<VelocityField> stage(slab.size(), VelocityField(nv));
        std::vector<VelocityField> k2(slab.size(), VelocityField(nv));
        VelocityField gl, gr;

        ghosts(slab, ki, t, gl, gr);
        rhs_slab(slab, gl, gr, k1);
        for (std::size_t i = 0; i < slab.size(); ++i)
            for (std::size_t p = 0; p < nv; ++p)
                stage[i][p] = slab[i][p] + tau * k1[i][p];
        ghosts(stage, ki, t + tau, gl, gr);
        rhs_slab(stage, gl, gr, k2);
        for (std::size_t i = 0; i < slab.size(); ++i)
            for (std::size_t p = 0; p < nv; ++p)
                slab[i][p] += 0.5 * tau * (k1[i][p] + k2[i][p]);
    }
}

void ChannelSolver::collision_substep(ChannelState& state, double tau) const {
    std::size_t m = keep_.size();
    if (lu_ == nullptr || lu_coef_ != tau) {
        Eigen::MatrixXd L(m, m);
        VelocityField e(grid_.num_nodes());
        for (std::size_t c = 0; c < m; ++c) {
            e[keep_[c]] = Cplx{1.0, 0.0};
            auto col = model_->apply_linearized(e);
            e[keep_[c]] = Cplx{0.0, 0.0};
            for (std::size_t r = 0; r < m; ++r)
                L(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    col[keep_[r]].real();
        }
        Eigen::MatrixXd A =
            Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                      static_cast<Eigen::Index>(m)) +
            tau * L;
        lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(A);
        lu_coef_ = tau;
    }

    std::size_t ncols = state.num_stored() * state.slab(0).size() * 2;
    Eigen::MatrixXd B(static_cast<Eigen::Index>(m),
                      static_cast<Eigen::Index>(ncols));
    std::size_t col = 0;
    for (std::size_t ki = 0; ki < state.num_stored(); ++ki)
        for (auto& f : state.slab(ki)) {
            for (std::size_t r = 0; r < m; ++r) {
                B(static_cast<Eigen::Index>(r),
                  static_cast<Eigen::Index>(col)) = f[keep_[r]].real();
                B(static_cast<Eigen::Index>(r),
                  static_cast<Eigen::Index>(col + 1)) = f[keep_[r]].imag();
            }
            col += 2;
        }
    Eigen::MatrixXd X = lu_->solve(B);
    col = 0;
    for (std::size_t ki = 0; ki < state.num_stored(); ++ki)
        for (auto& f : state.slab(ki)) {
            if (!mask_.empty())
                for (Cplx& z : f.values) z = Cplx{0.0, 0.0};
            for (std::size_t r = 0; r < m; ++r)
                f[keep_[r]] = Cplx{X(static_cast<Eigen::Index>(r),
                                     static_cast<Eigen::Index>(col)),
                                   X(static_cast<Eigen::Index>(r),
                                     static_cast<Eigen::Index>(col + 1))};
            col += 2;
        }
}

void ChannelSolver::step(ChannelState& state, double t,
                         const BoundaryData* data) const {
    double dt = opt_.dt;
    // transverse phase rotation commutes with the x1 transport, so the
    // composition below is a Strang splitting of (transport + phase) | L
    auto rotate = [&](double tau) {
        for (std::size_t ki = 0; ki < state.num_stored(); ++ki) {
            const KBar& k = state.keys()[ki];
            if (k[0] == 0 && k[1] == 0) continue;
            std::vector<Cplx> phase(grid_.num_nodes());
            for (std::size_t p = 0; p < grid_.num_nodes(); ++p) {
                const Vec3& v = grid_.nodes()[p];
                double arg = -(k[0] * v[1] + k[1] * v[2]) * tau;
                phase[p] = Cplx{std::cos(arg), std::sin(arg)};
            }
            for (auto& f : state.slab(ki))
                for (std::size_t p = 0; p < grid_.num_nodes(); ++p)
                    f[p] *= phase[p];
        }
    };

    transport_substep(state, 0.5 * dt, t, data);
    rotate(0.5 * dt);
    if (opt_.collision) collision_substep(state, dt);
    rotate(0.5 * dt);
    transport_substep(state, 0.5 * dt, t + 0.5 * dt, data);
    state.enforce_k0_real();
}

namespace {

double incoming_trace_sq(const VelocityGrid& g, const VelocityField& f,
                         bool minus_wall, const KBar& k, double inv_pow) {
    // int |v1|^{inv_pow} |f|^2 over the incoming half (v1 > 0 at the minus
    // wall, v1 < 0 at the plus wall)
    double total = 0.0;
    (void)k;
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        double v1 = g.nodes()[p][0];
        if (minus_wall ? (v1 <= 0.0) : (v1 >= 0.0)) continue;
        total += g.quad_weights()[p] * std::pow(std::abs(v1), inv_pow) *
                 std::norm(f[p]);
    }
    return total;
}

void check_samples(std::size_t s) {
    if (s == 2)
        throw std::invalid_argument(
            "boundary data needs >= 3 time samples (or 1, for stationary "
            "data) to form centered time differences");
}

}  // namespace

double boundary_functional_E(const BoundaryData& g, const LandauModel& model,
                             int kbar_max, int m) {
    const VelocityGrid& grid = model.grid();
    auto keys = kbar_keys(kbar_max);
    std::size_t s = g.minus.size();
    if (s != g.plus.size())
        throw std::invalid_argument("mismatched boundary sample counts");
    if (s == 0) throw std::invalid_argument("empty boundary data");
    check_samples(s);

    double total = 0.0;
    for (std::size_t ki = 0; ki < keys.size(); ++ki) {
        const KBar& k = keys[ki];
        double ek = 0.0;
        std::size_t jlo = (s == 1) ? 0 : 1;
        std::size_t jhi = (s == 1) ? 1 : s - 1;
        for (std::size_t j = jlo; j < jhi; ++j) {
            double at = 0.0;
            for (int wall = 0; wall < 2; ++wall) {
                const auto& samples = (wall == 0) ? g.minus : g.plus;
                const VelocityField& f = samples[j][ki];
                VelocityField dtf(grid.num_nodes());
                if (s > 1)
                    for (std::size_t p = 0; p < grid.num_nodes(); ++p)
                        dtf[p] = (samples[j + 1][ki][p] -
                                  samples[j - 1][ki][p]) /
                                 (2.0 * g.dt);
                VelocityField kvf(grid.num_nodes());
                for (std::size_t p = 0; p < grid.num_nodes(); ++p) {
                    const Vec3& v = grid.nodes()[p];
                    kvf[p] = (k[0] * v[1] + k[1] * v[2]) * f[p];
                }
                auto lf = model.apply_linearized(f);
                auto gf = model.apply_gamma(f, f);
                bool mn = (wall == 0);
                at += incoming_trace_sq(grid, dtf, mn, k, -1.0);
                at += incoming_trace_sq(grid, kvf, mn, k, -1.0);
                at += incoming_trace_sq(grid, lf, mn, k, -1.0);
                at += incoming_trace_sq(grid, gf, mn, k, -1.0);
                double kk = 1.0 + static_cast<double>(k[0] * k[0] +
                                                      k[1] * k[1]);
                at += kk * incoming_trace_sq(grid, f, mn, k, 1.0);
            }
            ek = std::max(ek, at);
        }
        double mult = (k[0] == 0 && k[1] == 0) ? 1.0 : 2.0;
        double jap = std::pow(
            1.0 + static_cast<double>(k[0] * k[0] + k[1] * k[1]),
            0.5 * m);
        total += mult * jap * std::sqrt(ek);
    }
    return total;
}

std::vector<std::array<VelocityField, 2>> boundary_x1_derivative(
    const BoundaryData& g, const LandauModel& model, int kbar_max,
    std::size_t tindex) {
    const VelocityGrid& grid = model.grid();
    auto keys = kbar_keys(kbar_max);
    std::size_t s = g.minus.size();
    check_samples(s);
    if (s > 1 && (tindex < 1 || tindex + 1 >= s))
        throw std::invalid_argument("tindex must be an interior time sample");

    std::vector<std::array<VelocityField, 2>> out(
        keys.size(), {VelocityField(grid.num_nodes()),
                      VelocityField(grid.num_nodes())});
    for (std::size_t ki = 0; ki < keys.size(); ++ki) {
        const KBar& k = keys[ki];
        for (int wall = 0; wall < 2; ++wall) {
            const auto& samples = (wall == 0) ? g.minus : g.plus;
            const VelocityField& f = samples[s == 1 ? 0 : tindex][ki];
            VelocityField dtf(grid.num_nodes());
            if (s > 1)
                for (std::size_t p = 0; p < grid.num_nodes(); ++p)
                    dtf[p] = (samples[tindex + 1][ki][p] -
                              samples[tindex - 1][ki][p]) /
                             (2.0 * g.dt);
            auto lf = model.apply_linearized(f);
            auto gf = model.apply_gamma(f, f);
            auto& tr = out[ki][static_cast<std::size_t>(wall)];
            for (std::size_t p = 0; p < grid.num_nodes(); ++p) {
                double v1 = grid.nodes()[p][0];
                bool incoming = (wall == 0) ? (v1 > 0.0) : (v1 < 0.0);
                if (!incoming) continue;
                const Vec3& v = grid.nodes()[p];
                Cplx kv{0.0, k[0] * v[1] + k[1] * v[2]};
                tr[p] = -(dtf[p] + kv * f[p] + lf[p] - gf[p]) / v1;
            }
        }
    }
    return out;
}

namespace {

// alpha = identity, d_x1 (central, one-sided at the boundary cells),
// i kbar_1, i kbar_2
void alpha_derivative(const ChannelState& st, std::size_t ki, int alpha,
                      std::vector<VelocityField>& out) {
    const auto& slab = st.slab(ki);
    const KBar& k = st.keys()[ki];
    int nx = st.n_x1();
    double h = st.x1_spacing();
    std::size_t nv = st.grid().num_nodes();
    if (alpha == 0) {
        out = slab;
        return;
    }
    if (alpha == 1) {
        for (int i = 0; i < nx; ++i) {
            auto& d = out[static_cast<std::size_t>(i)];
            for (std::size_t p = 0; p < nv; ++p) {
                if (i == 0)
                    d[p] = (slab[1][p] - slab[0][p]) / h;
                else if (i == nx - 1)
                    d[p] = (slab[static_cast<std::size_t>(nx - 1)][p] -
                            slab[static_cast<std::size_t>(nx - 2)][p]) /
                           h;
                else
                    d[p] = (slab[static_cast<std::size_t>(i + 1)][p] -
                            slab[static_cast<std::size_t>(i - 1)][p]) /
                           (2.0 * h);
            }
        }
        return;
    }
    Cplx ik{0.0, static_cast<double>(k[alpha - 2])};
    for (int i = 0; i < nx; ++i)
        for (std::size_t p = 0; p < nv; ++p)
            out[static_cast<std::size_t>(i)][p] =
                ik * slab[static_cast<std::size_t>(i)][p];
}

}  // namespace

ChannelEnergyAccum::ChannelEnergyAccum(const LandauModel& model,
                                       const WeightSpec& w)
    : model_(&model), w_(w), wf_(weight_field(model.grid(), w)) {}

void ChannelEnergyAccum::record(const ChannelState& state, double t) {
    const VelocityGrid& grid = state.grid();
    int nx = state.n_x1();
    double h = state.x1_spacing();
    std::size_t nv = grid.num_nodes();
    std::size_t nk = state.num_stored();
    if (n_records_ == 0) {
        mult_.resize(nk);
        for (std::size_t ki = 0; ki < nk; ++ki)
            mult_[ki] = (state.keys()[ki][0] == 0 && state.keys()[ki][1] == 0)
                            ? 1.0
                            : 2.0;
        sup_.assign(nk * 4, 0.0);
        dint_.assign(nk * 4, 0.0);
        prev_dsq_.assign(nk * 4, 0.0);
    }
    std::vector<VelocityField> buf(static_cast<std::size_t>(nx),
                                   VelocityField(nv));
    for (std::size_t ki = 0; ki < nk; ++ki) {
        for (int alpha = 0; alpha < 4; ++alpha) {
            alpha_derivative(state, ki, alpha, buf);
            double l2sq = 0.0, dsq = 0.0;
            for (int i = 0; i < nx; ++i) {
                const auto& f = buf[static_cast<std::size_t>(i)];
                for (std::size_t p = 0; p < nv; ++p)
                    l2sq += grid.quad_weights()[p] *
                            std::norm(wf_[p] * f[p]);
                dsq += model_->d_norm_sq(f, w_);
            }
            std::size_t slot = ki * 4 + static_cast<std::size_t>(alpha);
            sup_[slot] = std::max(sup_[slot], std::sqrt(h * l2sq));
            if (n_records_ > 0)
                dint_[slot] += 0.5 * (t - prev_t_) * (prev_dsq_[slot] + h * dsq);
            prev_dsq_[slot] = h * dsq;
        }
    }
    prev_t_ = t;
    ++n_records_;
}

std::pair<double, double> ChannelEnergyAccum::totals() const {
    double e_total = 0.0, d_total = 0.0;
    for (std::size_t ki = 0; ki < mult_.size(); ++ki)
        for (int alpha = 0; alpha < 4; ++alpha) {
            std::size_t slot = ki * 4 + static_cast<std::size_t>(alpha);
            e_total += mult_[ki] * sup_[slot];
            d_total += mult_[ki] * std::sqrt(std::max(0.0, dint_[slot]));
        }
    return {e_total, d_total};
}

std::pair<double, double> energy_functionals(
    const std::vector<ChannelState>& trajectory, double dt,
    const LandauModel& model, const WeightSpec& w) {
    if (trajectory.empty()) return {0.0, 0.0};
    ChannelEnergyAccum accum(model, w);
    for (std::size_t j = 0; j < trajectory.size(); ++j)
        accum.record(trajectory[j], static_cast<double>(j) * dt);
    return accum.totals();
}

}  // namespace kwnr

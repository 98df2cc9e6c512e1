#include "kwnr/spectral_field.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "kwnr/basis.hpp"
#include "kwnr/macro_micro.hpp"

namespace kwnr {

SpectralField::SpectralField(const VelocityGrid& grid, int k_max)
    : grid_(&grid), k_max_(k_max) {
    if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
    const int w = 2 * k_max + 1;
    index_.assign(static_cast<std::size_t>(w) * w * w, -1);
    for (int kx = -k_max; kx <= k_max; ++kx)
        for (int ky = -k_max; ky <= k_max; ++ky)
            for (int kz = -k_max; kz <= k_max; ++kz) {
                KPoint k{kx, ky, kz};
                if (!k_stored(k)) continue;
                std::size_t flat =
                    (static_cast<std::size_t>(kx + k_max) * w + (ky + k_max)) * w +
                    (kz + k_max);
                index_[flat] = static_cast<int>(keys_.size());
                keys_.push_back(k);
            }
    modes_.assign(keys_.size(), VelocityField(grid.num_nodes()));
}

bool SpectralField::in_truncation(const KPoint& k) const {
    return std::abs(k[0]) <= k_max_ && std::abs(k[1]) <= k_max_ &&
           std::abs(k[2]) <= k_max_;
}

int SpectralField::stored_index(const KPoint& k) const {
    if (!in_truncation(k) || !k_stored(k)) return -1;
    const int w = 2 * k_max_ + 1;
    std::size_t flat =
        (static_cast<std::size_t>(k[0] + k_max_) * w + (k[1] + k_max_)) * w +
        (k[2] + k_max_);
    return index_[flat];
}

VelocityField SpectralField::mode_at(const KPoint& k) const {
    if (!in_truncation(k)) return VelocityField(grid_->num_nodes());
    int i = stored_index(k);
    if (i >= 0) return modes_[i];
    i = stored_index(k_neg(k));
    VelocityField out = modes_[i];
    for (auto& z : out.values) z = std::conj(z);
    return out;
}

double SpectralField::conjugate_defect() const {
    int i0 = stored_index(KPoint{0, 0, 0});
    double m = 0.0;
    for (const auto& z : modes_[i0].values) m = std::max(m, std::abs(z.imag()));
    return m;
}

void SpectralField::enforce_k0_real() {
    int i0 = stored_index(KPoint{0, 0, 0});
    for (auto& z : modes_[i0].values) z = Cplx{z.real(), 0.0};
}

double SpectralField::l1k_l2v() const {
    double s = 0.0;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        double nrm = grid_->norm_l2(modes_[i]);
        s += (keys_[i] == KPoint{0, 0, 0}) ? nrm : 2.0 * nrm;
    }
    return s;
}

double SpectralField::l1k_l2v_weighted(const WeightSpec& w) const {
    auto wf = weight_field(*grid_, w);
    const auto& qw = grid_->quad_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        double acc = 0.0;
        for (std::size_t p = 0; p < qw.size(); ++p) {
            double a = std::abs(modes_[i][p]) * wf[p].real();
            acc += qw[p] * a * a;
        }
        double nrm = std::sqrt(acc);
        s += (keys_[i] == KPoint{0, 0, 0}) ? nrm : 2.0 * nrm;
    }
    return s;
}

VelocityField transport_term(const KPoint& k, const VelocityField& f,
                             const VelocityGrid& grid) {
    VelocityField out(grid.num_nodes());
    const auto& nodes = grid.nodes();
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        double kv = k[0] * nodes[p][0] + k[1] * nodes[p][1] + k[2] * nodes[p][2];
        out[p] = Cplx{0.0, -kv} * f[p];
    }
    return out;
}

ConservationFunctionals conservation_functionals(const SpectralField& field) {
    const auto& g = field.grid();
    auto inv = g.collision_invariants();
    const auto& f0 = field.mode(
        static_cast<std::size_t>(field.stored_index(KPoint{0, 0, 0})));
    ConservationFunctionals c;
    c.mass = g.inner_product(f0, inv[0]).real();
    for (int d = 0; d < 3; ++d)
        c.momentum[d] = g.inner_product(f0, inv[1 + d]).real();
    c.energy = g.inner_product(f0, inv[4]).real();
    return c;
}

SpectralField init_field(const std::string& preset, double amplitude, int k_max,
                         const VelocityGrid& grid, std::uint64_t seed) {
    SpectralField field(grid, k_max);
    const std::size_t n = grid.num_nodes();
    const auto& nodes = grid.nodes();
    auto smu = grid.sqrt_maxwellian();

    if (preset == "single_mode_micro") {
        if (k_max < 1) throw std::invalid_argument("single_mode_micro needs k_max >= 1");
        // fixed smooth shape v1 v2 sqrt(mu): microscopic by odd symmetry,
        // given a complex phase for genericity
        VelocityField f(n);
        for (std::size_t p = 0; p < n; ++p)
            f[p] = nodes[p][0] * nodes[p][1] * smu[p] * Cplx{1.0, 0.5};
        f = micro_part(grid, f);
        double nrm = grid.norm_l2(f);
        for (auto& z : f.values) z *= amplitude / nrm;
        field.mode(static_cast<std::size_t>(
            field.stored_index(KPoint{1, 0, 0}))) = f;
    } else if (preset == "random_micro") {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss;
        const int m = 20;
        auto basis = hermite_basis(grid, m);
        for (std::size_t i = 0; i < field.num_stored(); ++i) {
            const KPoint& k = field.keys()[i];
            bool zero_mode = (k == KPoint{0, 0, 0});
            VelocityField f(n);
            for (int a = 0; a < m; ++a) {
                Cplx c{gauss(rng), zero_mode ? 0.0 : gauss(rng)};
                for (std::size_t p = 0; p < n; ++p) f[p] += c * basis[a][p];
            }
            f = micro_part(grid, f);
            double nrm = grid.norm_l2(f);
            if (nrm > 0.0)
                for (auto& z : f.values) z *= amplitude / nrm;
            field.mode(i) = f;
        }
    } else if (preset == "macro_wave") {
        if (k_max < 1) throw std::invalid_argument("macro_wave needs k_max >= 1");
        // pure macroscopic wave at +-(1,0,0); k = 0 stays zero so the
        // conservation constraints hold
        MacroState mac;
        mac.a = Cplx{1.0, 0.3};
        mac.b = {Cplx{0.0, 0.0}, Cplx{0.5, 0.0}, Cplx{0.0, 0.0}};
        mac.c = Cplx{0.4, -0.2};
        auto f = macro_field(grid, mac);
        double nrm = grid.norm_l2(f);
        for (auto& z : f.values) z *= amplitude / nrm;
        field.mode(static_cast<std::size_t>(
            field.stored_index(KPoint{1, 0, 0}))) = f;
    } else {
        throw std::invalid_argument("unknown preset: " + preset);
    }
    return field;
}

void NormAccumulators::record(
    const SpectralField& field, double t, const WeightSpec& w,
    const std::function<double(const VelocityField&)>& dnorm_sq) {
    const auto& g = field.grid();
    auto wf = weight_field(g, w);
    const auto& qw = g.quad_weights();
    double dt = (last_t_ >= 0.0) ? t - last_t_ : 0.0;
    for (std::size_t i = 0; i < field.num_stored(); ++i) {
        const KPoint& k = field.keys()[i];
        const auto& f = field.mode(i);
        double mult = (k == KPoint{0, 0, 0}) ? 1.0 : 2.0;

        double nrm = g.norm_l2(f);
        double& s = sup_[k];
        s = std::max(s, mult * nrm);

        double acc = 0.0;
        for (std::size_t p = 0; p < qw.size(); ++p) {
            double a = std::abs(f[p]) * wf[p].real();
            acc += qw[p] * a * a;
        }
        double& sw = supw_[k];
        sw = std::max(sw, mult * std::sqrt(acc));

        if (dnorm_sq) {
            double dsq = dnorm_sq(f);
            // trapezoid in t on the squared dissipation norm
            double& di = dint_[k];
            double& prev = last_dsq_[k];
            if (dt > 0.0) di += 0.5 * dt * (prev + dsq) * mult * mult;
            prev = dsq;
        }
    }
    last_t_ = t;
}

double NormAccumulators::x_t() const {
    double s = 0.0;
    for (const auto& [k, v] : sup_) s += v;
    return s;
}

double NormAccumulators::x_t_weighted() const {
    double s = 0.0;
    for (const auto& [k, v] : supw_) s += v;
    return s;
}

double NormAccumulators::dissipation() const {
    double s = 0.0;
    for (const auto& [k, v] : dint_) s += std::sqrt(v);
    return s;
}

}  // namespace kwnr

#include "kwnr/macro_micro.hpp"

#include <cmath>
#include <stdexcept>

#include "kwnr/spectral_field.hpp"

namespace kwnr {

namespace {

// the five span fields {sqrt(mu), v_i sqrt(mu), ((|v|^2-3)/2) sqrt(mu)}
std::array<VelocityField, 5> span_fields(const VelocityGrid& g) {
    std::array<VelocityField, 5> e;
    auto smu = g.sqrt_maxwellian();
    const auto& nodes = g.nodes();
    const std::size_t n = g.num_nodes();
    for (auto& f : e) f = VelocityField(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& v = nodes[p];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        e[0][p] = smu[p];
        for (int d = 0; d < 3; ++d) e[1 + d][p] = v[d] * smu[p];
        e[4][p] = 0.5 * (r2 - 3.0) * smu[p];
    }
    return e;
}

}  // namespace

MacroState extract_macro(const VelocityGrid& g, const VelocityField& f) {
    auto e = span_fields(g);
    Eigen::Matrix<double, 5, 5> gram;
    Eigen::Matrix<Cplx, 5, 1> rhs;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j <= i; ++j) {
            double v = g.inner_product(e[i], e[j]).real();
            gram(i, j) = v;
            gram(j, i) = v;
        }
        rhs(i) = g.inner_product(f, e[i]);
    }
    Eigen::Matrix<Cplx, 5, 1> coef =
        gram.ldlt().solve(rhs.real().eval()).cast<Cplx>() +
        Cplx{0.0, 1.0} *
            gram.ldlt().solve(rhs.imag().eval()).cast<Cplx>();
    MacroState m;
    m.a = coef(0);
    for (int d = 0; d < 3; ++d) m.b[d] = coef(1 + d);
    m.c = coef(4);
    return m;
}

VelocityField macro_field(const VelocityGrid& g, const MacroState& m) {
    auto e = span_fields(g);
    VelocityField out(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        out[p] = m.a * e[0][p] + m.b[0] * e[1][p] + m.b[1] * e[2][p] +
                 m.b[2] * e[3][p] + m.c * e[4][p];
    return out;
}

VelocityField project_P(const VelocityGrid& g, const VelocityField& f) {
    return macro_field(g, extract_macro(g, f));
}

VelocityField micro_part(const VelocityGrid& g, const VelocityField& f) {
    auto pf = project_P(g, f);
    VelocityField out(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p) out[p] = f[p] - pf[p];
    return out;
}

Eigen::Matrix3cd theta_moment(const VelocityGrid& g, const VelocityField& f) {
    auto smu = g.sqrt_maxwellian();
    const auto& nodes = g.nodes();
    Eigen::Matrix3cd th = Eigen::Matrix3cd::Zero();
    VelocityField phi(g.num_nodes());
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            for (std::size_t p = 0; p < g.num_nodes(); ++p) {
                const auto& v = nodes[p];
                phi[p] = (v[i] * v[j] - (i == j ? 1.0 : 0.0)) * smu[p];
            }
            th(i, j) = g.inner_product(f, phi);
            th(j, i) = th(i, j);
        }
    return th;
}

Eigen::Vector3cd lambda_moment(const VelocityGrid& g, const VelocityField& f) {
    auto smu = g.sqrt_maxwellian();
    const auto& nodes = g.nodes();
    Eigen::Vector3cd lam = Eigen::Vector3cd::Zero();
    VelocityField phi(g.num_nodes());
    for (int j = 0; j < 3; ++j) {
        for (std::size_t p = 0; p < g.num_nodes(); ++p) {
            const auto& v = nodes[p];
            double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            phi[p] = 0.1 * (r2 - 5.0) * v[j] * smu[p];
        }
        lam(j) = g.inner_product(f, phi);
    }
    return lam;
}

double moment_system_residual(const std::vector<SpectralField>& traj,
                              double dt) {
    if (traj.size() < 3)
        throw std::invalid_argument("need at least three trajectory samples");
    const auto& grid = traj.front().grid();
    const Cplx I{0.0, 1.0};
    double worst = 0.0;
    for (std::size_t t = 1; t + 1 < traj.size(); ++t) {
        const auto& fm = traj[t - 1];
        const auto& f0 = traj[t];
        const auto& fp = traj[t + 1];
        for (std::size_t i = 0; i < f0.num_stored(); ++i) {
            const KPoint& k = f0.keys()[i];
            auto mm = extract_macro(grid, fm.mode(i));
            auto m0 = extract_macro(grid, f0.mode(i));
            auto mp = extract_macro(grid, fp.mode(i));
            auto mic = micro_part(grid, f0.mode(i));
            auto th = theta_moment(grid, mic);
            auto lam = lambda_moment(grid, mic);

            Cplx ra = (mp.a - mm.a) / (2.0 * dt) +
                      I * (static_cast<double>(k[0]) * m0.b[0] +
                           static_cast<double>(k[1]) * m0.b[1] +
                           static_cast<double>(k[2]) * m0.b[2]);
            worst = std::max(worst, std::abs(ra));
            for (int j = 0; j < 3; ++j) {
                Cplx div{0.0, 0.0};
                for (int m = 0; m < 3; ++m)
                    div += I * static_cast<double>(k[m]) * th(j, m);
                Cplx rb = (mp.b[j] - mm.b[j]) / (2.0 * dt) +
                          I * static_cast<double>(k[j]) * (m0.a + m0.c) + div;
                worst = std::max(worst, std::abs(rb));
            }
            Cplx kl{0.0, 0.0}, kb{0.0, 0.0};
            for (int m = 0; m < 3; ++m) {
                kl += static_cast<double>(k[m]) * lam(m);
                kb += static_cast<double>(k[m]) * m0.b[m];
            }
            Cplx rc = (mp.c - mm.c) / (2.0 * dt) + 2.0 * I / 3.0 * kb +
                      10.0 * I / 3.0 * kl;
            worst = std::max(worst, std::abs(rc));
        }
    }
    return worst;
}

}  // namespace kwnr

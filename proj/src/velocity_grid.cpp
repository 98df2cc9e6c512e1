#include "kwnr/velocity_grid.hpp"

#include <cmath>

namespace kwnr {

VelocityGrid::VelocityGrid(int n_per_dim, double v_max)
    : n_(n_per_dim), v_max_(v_max) {
    if (n_per_dim < 8) throw std::invalid_argument("n_per_dim must be >= 8");
    if (n_per_dim % 2 != 0)
        throw std::invalid_argument("n_per_dim must be even (v=0 node not allowed)");
    if (v_max <= 0.0) throw std::invalid_argument("v_max must be positive");

    spacing_ = 2.0 * v_max_ / (n_ - 1);
    axis_.resize(n_);
    for (int i = 0; i < n_; ++i) axis_[i] = -v_max_ + i * spacing_;

    // 1D trapezoid weights, tensorized.
    std::vector<double> w1(n_, spacing_);
    w1.front() = 0.5 * spacing_;
    w1.back() = 0.5 * spacing_;

    nodes_.resize(static_cast<std::size_t>(n_) * n_ * n_);
    qw_.resize(nodes_.size());
    for (int ix = 0; ix < n_; ++ix)
        for (int iy = 0; iy < n_; ++iy)
            for (int iz = 0; iz < n_; ++iz) {
                std::size_t id = index(ix, iy, iz);
                nodes_[id] = {axis_[ix], axis_[iy], axis_[iz]};
                qw_[id] = w1[ix] * w1[iy] * w1[iz];
            }
}

Cplx VelocityGrid::integrate(const VelocityField& f) const {
    Cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < qw_.size(); ++i) acc += qw_[i] * f[i];
    return acc;
}

Cplx VelocityGrid::inner_product(const VelocityField& f, const VelocityField& g) const {
    if (f.size() != qw_.size() || g.size() != qw_.size())
        throw std::invalid_argument("inner_product: field/grid size mismatch");
    Cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < qw_.size(); ++i)
        acc += qw_[i] * f[i] * std::conj(g[i]);
    return acc;
}

double VelocityGrid::norm_l2(const VelocityField& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < qw_.size(); ++i) acc += qw_[i] * std::norm(f[i]);
    return std::sqrt(acc);
}

VelocityField VelocityGrid::maxwellian() const {
    const double c = std::pow(2.0 * M_PI, -1.5);
    VelocityField f(num_nodes());
    for (std::size_t i = 0; i < num_nodes(); ++i) {
        const Vec3& v = nodes_[i];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        f[i] = c * std::exp(-0.5 * r2);
    }
    return f;
}

VelocityField VelocityGrid::sqrt_maxwellian() const {
    const double c = std::pow(2.0 * M_PI, -0.75);
    VelocityField f(num_nodes());
    for (std::size_t i = 0; i < num_nodes(); ++i) {
        const Vec3& v = nodes_[i];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        f[i] = c * std::exp(-0.25 * r2);
    }
    return f;
}

std::array<VelocityField, 5> VelocityGrid::collision_invariants() const {
    std::array<VelocityField, 5> out;
    VelocityField sm = sqrt_maxwellian();
    out[0] = sm;
    for (int j = 0; j < 3; ++j) {
        out[1 + j] = VelocityField(num_nodes());
        for (std::size_t i = 0; i < num_nodes(); ++i)
            out[1 + j][i] = nodes_[i][j] * sm[i];
    }
    out[4] = VelocityField(num_nodes());
    for (std::size_t i = 0; i < num_nodes(); ++i) {
        const Vec3& v = nodes_[i];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        out[4][i] = r2 * sm[i];
    }
    return out;
}

}  // namespace kwnr

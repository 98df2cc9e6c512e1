#include "kwnr/fd.hpp"

#include <cmath>

namespace kwnr {

std::vector<std::pair<int, double>> derivative_stencil_1d(int n, int i, double h) {
    std::vector<std::pair<int, double>> st;
    if (i == 0) {
        st = {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
    } else if (i == n - 1) {
        st = {{n - 1, 1.5 / h}, {n - 2, -2.0 / h}, {n - 3, 0.5 / h}};
    } else if (i == 1 || i == n - 2) {
        st = {{i - 1, -0.5 / h}, {i + 1, 0.5 / h}};
    } else {
        const double c1 = 8.0 / (12.0 * h), c2 = 1.0 / (12.0 * h);
        st = {{i - 2, c2}, {i - 1, -c1}, {i + 1, c1}, {i + 2, -c2}};
    }
    return st;
}

void apply_derivative(const VelocityGrid& grid, const VelocityField& f, int axis,
                      VelocityField& out) {
    const int n = grid.n_per_dim();
    const double h = grid.spacing();
    out.values.assign(f.size(), Cplx{0.0, 0.0});

    // Stride of the differentiated axis in the flattened (ix, iy, iz) layout.
    const std::size_t strides[3] = {static_cast<std::size_t>(n) * n,
                                    static_cast<std::size_t>(n), 1};
    const std::size_t stride = strides[axis];

    // Precompute per-layer stencils once.
    std::vector<std::vector<std::pair<int, double>>> st(n);
    for (int i = 0; i < n; ++i) st[i] = derivative_stencil_1d(n, i, h);

    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib)
            for (int ic = 0; ic < n; ++ic) {
                int idx3[3];
                idx3[axis] = ia;
                int other = 0;
                for (int d = 0; d < 3; ++d)
                    if (d != axis) idx3[d] = (other++ == 0) ? ib : ic;
                std::size_t base = grid.index(idx3[0], idx3[1], idx3[2]);
                std::size_t line0 = base - ia * stride;
                Cplx acc{0.0, 0.0};
                for (auto [j, c] : st[ia]) acc += c * f[line0 + j * stride];
                out[base] = acc;
            }
}

VelocityField derivative(const VelocityGrid& grid, const VelocityField& f, int axis) {
    VelocityField out;
    apply_derivative(grid, f, axis, out);
    return out;
}

void apply_maxwellian_derivative(const VelocityGrid& grid, const VelocityField& f,
                                 int axis, VelocityField& out) {
    const std::size_t N = grid.num_nodes();
    VelocityField phi(N);
    for (std::size_t p = 0; p < N; ++p) {
        const Vec3& v = grid.nodes()[p];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        phi[p] = f[p] * std::exp(0.25 * r2);
    }
    apply_derivative(grid, phi, axis, out);
    for (std::size_t p = 0; p < N; ++p) {
        const Vec3& v = grid.nodes()[p];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        out[p] = out[p] * std::exp(-0.25 * r2) - 0.5 * v[axis] * f[p];
    }
}

VelocityField maxwellian_derivative(const VelocityGrid& grid, const VelocityField& f,
                                    int axis) {
    VelocityField out;
    apply_maxwellian_derivative(grid, f, axis, out);
    return out;
}

}  // namespace kwnr

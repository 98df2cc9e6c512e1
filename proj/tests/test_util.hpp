#pragma once

#include <random>

#include "kwnr/velocity_grid.hpp"

namespace kwnr::testutil {

/// Random smooth decaying field: cubic polynomial with N(0,1) coefficients
/// times exp(-|v|^2/4), normalized in the grid L^2 norm.
inline VelocityField random_decaying_field(const VelocityGrid& grid, std::mt19937& rng,
                                           bool complex_valued = false) {
    std::normal_distribution<double> gauss;
    double cr[20], ci[20];
    for (int i = 0; i < 20; ++i) {
        cr[i] = gauss(rng);
        ci[i] = complex_valued ? gauss(rng) : 0.0;
    }
    VelocityField f(grid.num_nodes());
    for (std::size_t p = 0; p < grid.num_nodes(); ++p) {
        const Vec3& v = grid.nodes()[p];
        double mono[20];
        int t = 0;
        mono[t++] = 1.0;
        for (int a = 0; a < 3; ++a) mono[t++] = v[a];
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) mono[t++] = v[a] * v[b];
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b)
                for (int c = b; c < 3; ++c) mono[t++] = v[a] * v[b] * v[c];
        double pr = 0.0, pi = 0.0;
        for (int i = 0; i < 20; ++i) {
            pr += cr[i] * mono[i];
            pi += ci[i] * mono[i];
        }
        double env = std::exp(-0.25 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
        f[p] = Cplx{pr * env, pi * env};
    }
    double nrm = grid.norm_l2(f);
    for (auto& x : f.values) x /= nrm;
    return f;
}

}  // namespace kwnr::testutil

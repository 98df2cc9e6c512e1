#include "kwnr/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace kwnr {

namespace {

// He_k(x), probabilists' convention: He_0 = 1, He_1 = x,
// He_{k+1} = x He_k - k He_{k-1}.
double hermite_he(int k, double x) {
    double hm = 1.0, h = x;
    if (k == 0) return hm;
    for (int m = 1; m < k; ++m) {
        double hn = x * h - m * hm;
        hm = h;
        h = hn;
    }
    return h;
}

}  // namespace

std::vector<VelocityField> hermite_basis(const VelocityGrid& grid, int count) {
    // enumerate multi-indices graded by degree, lexicographic within a degree
    std::vector<std::array<int, 3>> idx;
    for (int d = 0; static_cast<int>(idx.size()) < count; ++d)
        for (int i = 0; i <= d; ++i)
            for (int j = 0; i + j <= d; ++j) {
                idx.push_back({i, j, d - i - j});
                if (static_cast<int>(idx.size()) == count) break;
            }
    idx.resize(count);
    std::sort(idx.begin(), idx.end(), [](const auto& a, const auto& b) {
        int da = a[0] + a[1] + a[2], db = b[0] + b[1] + b[2];
        if (da != db) return da < db;
        return a < b;
    });

    auto smu = grid.sqrt_maxwellian();
    std::vector<VelocityField> out;
    out.reserve(count);
    for (const auto& m : idx) {
        double fact = 1.0;
        for (int c = 0; c < 3; ++c)
            for (int p = 2; p <= m[c]; ++p) fact *= p;
        const double norm = 1.0 / std::sqrt(fact);
        VelocityField f(grid.num_nodes());
        for (std::size_t p = 0; p < grid.num_nodes(); ++p) {
            const Vec3& v = grid.nodes()[p];
            f[p] = norm * hermite_he(m[0], v[0]) * hermite_he(m[1], v[1]) *
                   hermite_he(m[2], v[2]) * smu[p];
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace kwnr

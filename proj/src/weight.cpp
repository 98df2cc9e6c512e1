#include "kwnr/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace kwnr {

void WeightSpec::validate() const {
    if (q < 0.0) throw std::invalid_argument("weight: q must be >= 0");
    if (model_kind == ModelKind::Landau) {
        if (gamma < -3.0 || gamma > 1.0)
            throw std::invalid_argument("Landau: gamma must lie in [-3, 1]");
        if (gamma >= -2.0) {
            if (q != 0.0)
                throw std::invalid_argument("Landau hard range (-2 <= gamma <= 1) requires q = 0");
        } else {
            if (q <= 0.0)
                throw std::invalid_argument("Landau soft range (gamma < -2) requires q > 0");
            if (theta <= 0.0 || theta > 2.0)
                throw std::invalid_argument("Landau soft range requires 0 < theta <= 2");
            if (theta == 2.0 && q >= 1.0)
                throw std::invalid_argument("Landau soft range with theta = 2 requires q < 1");
        }
    } else {
        if (s <= 0.0 || s >= 1.0)
            throw std::invalid_argument("Boltzmann: s must lie in (0, 1)");
        if (gamma <= std::max(-3.0, -1.5 - 2.0 * s))
            throw std::invalid_argument("Boltzmann: gamma must exceed max(-3, -3/2 - 2 s)");
        if (gamma + 2.0 * s >= 0.0) {
            if (q != 0.0)
                throw std::invalid_argument("Boltzmann hard range (gamma + 2 s >= 0) requires q = 0");
        } else {
            if (q <= 0.0)
                throw std::invalid_argument("Boltzmann soft range requires q > 0");
            if (theta != 1.0)
                throw std::invalid_argument("Boltzmann soft range requires theta = 1");
        }
    }
}

double weight_value(const WeightSpec& w, const Vec3& v) {
    if (w.q == 0.0) return 1.0;
    double av = std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return std::exp(0.25 * w.q * std::pow(av, w.theta));
}

VelocityField weight_field(const VelocityGrid& grid, const WeightSpec& w) {
    w.validate();
    VelocityField f(grid.num_nodes());
    for (std::size_t i = 0; i < grid.num_nodes(); ++i)
        f[i] = weight_value(w, grid.nodes()[i]);
    return f;
}

}  // namespace kwnr

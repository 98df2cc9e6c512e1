#pragma once

#include "kwnr/velocity_grid.hpp"

namespace kwnr {

enum class ModelKind { Landau, Boltzmann };

/// Parameters of the exponential velocity weight w_{q,theta}(v) = exp(q <v>^theta / 4),
/// together with the collision-model parameters they must be compatible with.
struct WeightSpec {
    double q = 0.0;
    double theta = 2.0;
    ModelKind model_kind = ModelKind::Landau;
    double gamma = 0.0;
    double s = 0.5;  // Boltzmann only

    /// Throws std::invalid_argument if the admissibility hypothesis on
    /// (q, theta, gamma, s) is violated.
    void validate() const;

    bool is_soft() const {
        return model_kind == ModelKind::Landau ? (gamma + 2.0 < 0.0)
                                               : (gamma + 2.0 * s < 0.0);
    }
};

/// Pointwise w_{q,theta} samples; identically 1 when q = 0.
VelocityField weight_field(const VelocityGrid& grid, const WeightSpec& w);

/// Scalar w_{q,theta}(v).
double weight_value(const WeightSpec& w, const Vec3& v);

}  // namespace kwnr

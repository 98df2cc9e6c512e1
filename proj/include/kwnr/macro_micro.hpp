#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "kwnr/velocity_grid.hpp"

namespace kwnr {

class SpectralField;

/// Coefficients of the macroscopic part
///   P f = { a + b . v + c (|v|^2 - 3)/2 } sqrt(mu).
struct MacroState {
    Cplx a{0.0, 0.0};
    std::array<Cplx, 3> b{Cplx{0.0, 0.0}, Cplx{0.0, 0.0}, Cplx{0.0, 0.0}};
    Cplx c{0.0, 0.0};
};

/// Coefficients via the discrete Gram of the five span fields, so that the
/// projection is exactly idempotent at the quadrature level (the continuum
/// orthogonality holds only up to quadrature error).
MacroState extract_macro(const VelocityGrid& grid, const VelocityField& f);

VelocityField macro_field(const VelocityGrid& grid, const MacroState& m);

/// P f as a field; micro_part returns {I - P} f.
VelocityField project_P(const VelocityGrid& grid, const VelocityField& f);
VelocityField micro_part(const VelocityGrid& grid, const VelocityField& f);

/// Theta_jm(f) = ( (v_j v_m - 1) sqrt(mu), f )
Eigen::Matrix3cd theta_moment(const VelocityGrid& grid, const VelocityField& f);

/// Lambda_j(f) = (1/10) ( (|v|^2 - 5) v_j sqrt(mu), f )
Eigen::Vector3cd lambda_moment(const VelocityGrid& grid, const VelocityField& f);

/// Max residual, over interior times and all modes, of the Fourier-side local
/// conservation laws
///   d_t a + i k . b = 0
///   d_t b_j + i k_j (a + c) + i sum_m k_m Theta_jm({I-P} f) = 0
///   d_t c + (2i/3) k . b + (10i/3) k . Lambda({I-P} f) = 0
/// (coefficients follow from the (a, b, c) normalization above: taking moments
/// of the transport term against v_j sqrt(mu) and (|v|^2-3) sqrt(mu) / 3)
/// with centered time differences on a trajectory sampled at uniform spacing dt.
double moment_system_residual(const std::vector<SpectralField>& trajectory,
                              double dt);

}  // namespace kwnr

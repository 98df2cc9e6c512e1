#pragma once

#include <vector>

#include "kwnr/velocity_grid.hpp"

namespace kwnr {

/// First `count` tensor-Hermite-weighted grid functions
///   He_i(v1) He_j(v2) He_k(v3) sqrt(mu) / sqrt(i! j! k!),
/// graded by total degree i+j+k, then ordered lexicographically in (i, j, k).
/// The first field is exactly sqrt(mu); the first 20 span total degree <= 3
/// and contain all five collision invariants. Continuum-orthonormal in L^2(dv).
std::vector<VelocityField> hermite_basis(const VelocityGrid& grid, int count);

}  // namespace kwnr

#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

namespace kwnr {

using Cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Complex-valued function of v sampled on the nodes of a VelocityGrid
/// (one spatial Fourier mode's f-hat(k, .)).
struct VelocityField {
    std::vector<Cplx> values;

    VelocityField() = default;
    explicit VelocityField(std::size_t n) : values(n, Cplx{0.0, 0.0}) {}

    std::size_t size() const { return values.size(); }
    Cplx& operator[](std::size_t i) { return values[i]; }
    const Cplx& operator[](std::size_t i) const { return values[i]; }
};

/// Truncated Cartesian velocity lattice on [-v_max, v_max]^3.
///
/// Nodes are endpoint-included and uniform, spacing = 2*v_max/(n_per_dim-1).
/// n_per_dim is required to be even so that v = 0 is never a node; this keeps
/// the radial projection P_v well defined everywhere and makes odd-symmetry
/// cancellations exact on the index lattice.
class VelocityGrid {
  public:
    VelocityGrid(int n_per_dim, double v_max);

    int n_per_dim() const { return n_; }
    double v_max() const { return v_max_; }
    double spacing() const { return spacing_; }
    std::size_t num_nodes() const { return nodes_.size(); }

    const std::vector<Vec3>& nodes() const { return nodes_; }
    const std::vector<double>& quad_weights() const { return qw_; }

    /// 1D node coordinate for index i in [0, n_per_dim).
    double axis_coord(int i) const { return axis_[i]; }

    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * n_ + iy) * n_ + iz;
    }

    /// Trapezoid-rule approximation of the R^3 integral of f.
    Cplx integrate(const VelocityField& f) const;

    /// Complex L^2_v inner product (f, g) = int f conj(g) dv by quadrature.
    Cplx inner_product(const VelocityField& f, const VelocityField& g) const;

    double norm_l2(const VelocityField& f) const;

    /// Pointwise samples of the Maxwellian mu = (2 pi)^{-3/2} exp(-|v|^2/2).
    VelocityField maxwellian() const;

    /// Pointwise samples of sqrt(mu).
    VelocityField sqrt_maxwellian() const;

    /// The five fields {sqrt(mu), v_i sqrt(mu), |v|^2 sqrt(mu)}.
    std::array<VelocityField, 5> collision_invariants() const;

  private:
    int n_;
    double v_max_;
    double spacing_;
    std::vector<double> axis_;
    std::vector<Vec3> nodes_;
    std::vector<double> qw_;
};

}  // namespace kwnr

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kwnr/velocity_grid.hpp"
#include "kwnr/weight.hpp"

namespace kwnr {

using KPoint = std::array<int, 3>;

inline KPoint k_neg(const KPoint& k) { return {-k[0], -k[1], -k[2]}; }
/// Half-lattice convention: a mode is stored iff k = 0 or the first nonzero
/// component of k is positive; the other half follows by conjugation.
inline bool k_stored(const KPoint& k) {
    for (int d = 0; d < 3; ++d) {
        if (k[d] > 0) return true;
        if (k[d] < 0) return false;
    }
    return true;  // k == 0
}

/// Fourier-in-x field on T^3 truncated to |k_i| <= k_max, stored on the half
/// lattice with conjugate completion (real physical solution).
class SpectralField {
  public:
    SpectralField(const VelocityGrid& grid, int k_max);

    const VelocityGrid& grid() const { return *grid_; }
    int k_max() const { return k_max_; }
    bool in_truncation(const KPoint& k) const;

    /// Stored (half-lattice) keys, in a fixed deterministic order.
    const std::vector<KPoint>& keys() const { return keys_; }
    std::size_t num_stored() const { return keys_.size(); }

    VelocityField& mode(std::size_t stored_index) { return modes_[stored_index]; }
    const VelocityField& mode(std::size_t stored_index) const {
        return modes_[stored_index];
    }
    /// Index into keys()/mode() for a stored k; -1 if k is not stored
    /// (conjugate half or outside truncation).
    int stored_index(const KPoint& k) const;

    /// Mode value at any lattice point: stored value, conjugate of the stored
    /// partner, or zero outside the truncation.
    VelocityField mode_at(const KPoint& k) const;

    /// Residual imaginary part of the k = 0 mode (conjugate symmetry holds
    /// structurally everywhere else).
    double conjugate_defect() const;
    /// Drop the k = 0 imaginary part (roundoff from the nonlinear term).
    void enforce_k0_real();

    /// sum_k ||f_hat(k)||_{L^2_v} over the full lattice
    double l1k_l2v() const;
    /// same with pointwise weight w
    double l1k_l2v_weighted(const WeightSpec& w) const;

  private:
    const VelocityGrid* grid_;
    int k_max_;
    std::vector<KPoint> keys_;
    std::vector<VelocityField> modes_;
    std::vector<int> index_;  // dense (2k_max+1)^3 lookup, -1 for conjugate half
};

/// -i (k . v) f_hat, the transport contribution to the right side.
VelocityField transport_term(const KPoint& k, const VelocityField& f,
                             const VelocityGrid& grid);

/// mass, momentum, energy functionals of the k = 0 mode.
struct ConservationFunctionals {
    double mass = 0.0;
    Vec3 momentum{0.0, 0.0, 0.0};
    double energy = 0.0;
};
ConservationFunctionals conservation_functionals(const SpectralField& field);

/// Initial-data presets. All presets have the k = 0 macroscopic coefficients
/// removed so that the mass/momentum/energy constraints hold exactly.
/// presets: single_mode_micro | random_micro | macro_wave
SpectralField init_field(const std::string& preset, double amplitude, int k_max,
                         const VelocityGrid& grid, std::uint64_t seed = 0);

/// Running accumulators for the sup-in-time and time-integrated norms.
class NormAccumulators {
  public:
    /// dnorm_sq(mode) evaluates the squared dissipation norm of one mode.
    void record(const SpectralField& field, double t, const WeightSpec& w,
                const std::function<double(const VelocityField&)>& dnorm_sq);

    /// X_T = sum_k sup_t ||f_hat(k)||  (conjugate modes counted)
    double x_t() const;
    double x_t_weighted() const;
    /// sum_k ( int_0^T |w f_hat(k)|_D^2 dt )^{1/2}
    double dissipation() const;
    bool empty() const { return last_t_ < 0.0; }

  private:
    std::map<KPoint, double> sup_, supw_, dint_;
    std::map<KPoint, double> last_dsq_;
    double last_t_ = -1.0;
};

}  // namespace kwnr

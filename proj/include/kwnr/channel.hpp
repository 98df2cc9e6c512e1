#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kwnr/landau.hpp"
#include "kwnr/velocity_grid.hpp"
#include "kwnr/weight.hpp"

namespace kwnr {

using KBar = std::array<int, 2>;

inline KBar kbar_neg(const KBar& k) { return {-k[0], -k[1]}; }
inline bool kbar_stored(const KBar& k) {
    if (k[0] != 0) return k[0] > 0;
    return k[1] >= 0;
}

/// Deterministic ordering of the stored transverse half-lattice, shared by
/// ChannelState and BoundaryData.
std::vector<KBar> kbar_keys(int kbar_max);

/// f_hat(t, x1, kbar, v) on the finite channel x1 in (-1, 1): uniform
/// cell-centered x1 grid (symmetric about 0, no wall node), Fourier in the
/// transverse variable truncated to |kbar_i| <= kbar_max, half-lattice storage
/// with conjugate completion.
class ChannelState {
  public:
    ChannelState(const VelocityGrid& grid, int n_x1, int kbar_max);

    const VelocityGrid& grid() const { return *grid_; }
    int n_x1() const { return n_x1_; }
    int kbar_max() const { return kbar_max_; }
    double x1_spacing() const { return 2.0 / n_x1_; }
    double x1_node(int i) const { return -1.0 + (i + 0.5) * x1_spacing(); }

    const std::vector<KBar>& keys() const { return keys_; }
    std::size_t num_stored() const { return keys_.size(); }
    int stored_index(const KBar& k) const;
    bool in_truncation(const KBar& k) const;

    /// Slab of n_x1 velocity fields for one stored kbar.
    std::vector<VelocityField>& slab(std::size_t i) { return slabs_[i]; }
    const std::vector<VelocityField>& slab(std::size_t i) const {
        return slabs_[i];
    }

    double conjugate_defect() const;  // imag residue of the kbar = 0 slab
    void enforce_k0_real();

    /// sum_kbar sup_x1 ||f_hat||_{L^2_v} (conjugate modes counted)
    double l1kbar_norm() const;

  private:
    const VelocityGrid* grid_;
    int n_x1_, kbar_max_;
    std::vector<KBar> keys_;
    std::vector<std::vector<VelocityField>> slabs_;
};

/// Time-sampled inflow data on the incoming velocity half-grids:
/// minus[t][stored kbar] lives on v1 > 0 (wall x1 = -1), plus on v1 < 0
/// (wall x1 = +1); values must vanish on the outgoing half.
struct BoundaryData {
    double dt = 0.0;  // sample spacing; single-sample data is t-independent
    std::vector<std::vector<VelocityField>> minus, plus;

    /// Piecewise-linear sample at time t (clamped to the sampled range).
    VelocityField minus_at(double t, std::size_t kidx) const;
    VelocityField plus_at(double t, std::size_t kidx) const;
};

/// Named boundary presets ("zero", "maxwell_pulse"): maxwell_pulse drives the
/// kbar = 0 incoming half with amplitude * sqrt(mu), constant in time.
BoundaryData make_boundary_preset(const std::string& preset, double amplitude,
                                  int kbar_max, const VelocityGrid& grid);

/// Channel initial-data presets:
///  symmetric_micro — microscopic data satisfying the specular symmetry
///                    f(-x1, -v1, vbar) = f(x1, v1, vbar) exactly on the lattice
///  random          — seeded unconstrained microscopic data
ChannelState channel_init(const std::string& preset, double amplitude,
                          int n_x1, int kbar_max, const VelocityGrid& grid,
                          std::uint64_t seed = 0);

/// max |f_hat(x1, kbar, v1, vbar) - f_hat(-x1, kbar, -v1, vbar)|
double symmetry_defect(const ChannelState& state);

/// Specular wall condition: the ghost value `layer` cells beyond the wall is
/// the v1-mirror of the interior value `layer` cells inside it
/// (f_ghost(v1, vbar) = f_interior(-v1, vbar)).
VelocityField specular_ghost(const std::vector<VelocityField>& slab,
                             const VelocityGrid& grid, bool right_wall,
                             int layer);

enum class ChannelBC { Specular, Inflow };

struct ChannelOptions {
    double dt = 0.0;
    ChannelBC bc = ChannelBC::Specular;
    bool collision = true;
    /// support restriction |v| <= ball_radius (see TorusOptions::ball_radius)
    double ball_radius = 0.0;
};

/// Linear channel evolution d_t f + v1 d_x1 f + i kbar.vbar f + L f = 0 with
/// inflow or specular walls. Strang composition per step: exact transverse
/// phase rotation and RK2 upwind x1-transport on the half steps, one batched
/// implicit (backward Euler) collision solve in the middle. The x1 derivative
/// is 2nd-order upwind by sign(v1) with ghost cells from the active wall
/// condition and a first-order one-sided stencil at the wall-adjacent cell.
class ChannelSolver {
  public:
    ChannelSolver(const LandauModel& model, const ChannelOptions& opt);

    const ChannelOptions& options() const { return opt_; }

    /// Advance one step from time t; inflow runs need `data`.
    void step(ChannelState& state, double t,
              const BoundaryData* data = nullptr) const;

  private:
    const LandauModel* model_;
    const VelocityGrid& grid_;
    ChannelOptions opt_;
    std::vector<char> mask_;
    std::vector<std::size_t> keep_;
    mutable std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    mutable double lu_coef_ = -1.0;

    void apply_mask(VelocityField& f) const;
    void transport_substep(ChannelState& state, double tau, double t,
                           const BoundaryData* data) const;
    void collision_substep(ChannelState& state, double tau) const;
};

/// Boundary functional E: per stored kbar, the sup over interior time samples
/// of the five-trace integral over the incoming halves of both walls,
///   int |v1|^{-1} { |d_t g|^2 + |kbar.vbar|^2 |g|^2 + |L g|^2
///                   + |Gamma(g,g)|^2 } + |v1| (1 + |kbar|^2) |g|^2 dv,
/// then E = sum_kbar <kbar>^m sqrt(E_kbar). d_t by centered differences
/// (needs >= 3 samples unless the data is time-independent).
double boundary_functional_E(const BoundaryData& g, const LandauModel& model,
                             int kbar_max, int m = 0);

/// Wall trace of d_x1 f_hat on the incoming halves, from the equation:
///   -v1^{-1} { d_t g + i kbar.vbar g + L g - Gamma(g, g) }
/// at interior time sample `tindex` (or 0 for time-independent data).
/// Returns [stored kbar][0 = minus wall, 1 = plus wall].
std::vector<std::array<VelocityField, 2>> boundary_x1_derivative(
    const BoundaryData& g, const LandauModel& model, int kbar_max,
    std::size_t tindex = 0);

/// Energy / dissipation pair over a uniformly sampled trajectory:
///   E = sum_{|alpha| <= 1} sum_kbar sup_t || w d^alpha f_hat ||_{L^2_{x1,v}}
///   D = sum_{|alpha| <= 1} sum_kbar sqrt( int_0^T |w d^alpha f_hat|_D^2 dt )
/// with d_x1 central differences, d_xbar = i kbar multiplication, and the
/// model D-norm summed over x1 cells.
std::pair<double, double> energy_functionals(
    const std::vector<ChannelState>& trajectory, double dt,
    const LandauModel& model, const WeightSpec& w);

/// Online form of energy_functionals: feed uniformly spaced samples through
/// record() (time integrals by trapezoid between consecutive records) and
/// read off (E, D) at any point. Long runs then never store a trajectory.
class ChannelEnergyAccum {
  public:
    ChannelEnergyAccum(const LandauModel& model, const WeightSpec& w);

    void record(const ChannelState& state, double t);
    std::pair<double, double> totals() const;

  private:
    const LandauModel* model_;
    WeightSpec w_;
    VelocityField wf_;
    std::vector<double> mult_, sup_, dint_, prev_dsq_;
    double prev_t_ = 0.0;
    std::size_t n_records_ = 0;
};

}  // namespace kwnr

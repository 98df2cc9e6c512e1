#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <mutex>

#include "kwnr/conv3d.hpp"
#include "kwnr/velocity_grid.hpp"
#include "kwnr/weight.hpp"

namespace kwnr {

/// psi^{jm}(z) = (delta_jm - z_j z_m / |z|^2) |z|^{gamma+2}; psi(0) := 0
/// (the zero-offset convolution cell carries zero weight for every gamma).
std::array<std::array<double, 3>, 3> psi_kernel(const Vec3& z, double gamma);

/// Landau collision model on a fixed velocity grid: sigma coefficients, the
/// linearized operator L, the bilinear operator Gamma, and the D-norm.
class LandauModel {
  public:
    LandauModel(const VelocityGrid& grid, double gamma);

    const VelocityGrid& grid() const { return grid_; }
    double gamma() const { return gamma_; }

    /// Flattened index of the symmetric pair (j, m) in {00, 01, 02, 11, 12, 22}.
    static int sym_index(int j, int m);

    /// sigma^{jm} = psi^{jm} * mu, stored as six real fields in sym_index order.
    const std::array<std::vector<double>, 6>& sigma() const { return sigma_; }

    /// Convolution fields of a first argument f, reusable across many second
    /// arguments (the Fourier-mode convolution sum in the torus solver).
    struct FirstArg {
        std::array<VelocityField, 6> A;  // psi^{ij} * (sqrt(mu) f), sym order
        std::array<VelocityField, 3> B;  // sum_i psi^{ij} * (v_i sqrt(mu) f)
        std::array<VelocityField, 3> C;  // sum_j psi^{ij} * (sqrt(mu) d_j f)
        VelocityField D0;                // sum_ij psi^{ij} * (v_i sqrt(mu) d_j f)
    };
    struct SecondArg {
        VelocityField g;
        std::array<VelocityField, 3> dg;
    };

    FirstArg make_first_arg(const VelocityField& f) const;   // 16 fwd + 13 inv FFTs
    SecondArg make_second_arg(const VelocityField& g) const;

    /// Cached arguments of sqrt(mu), so callers accumulating many Gamma pairs
    /// can fold the linearized operator into the same pass:
    ///   -L f = Gamma(sqrt(mu), f) + Gamma(f, sqrt(mu)).
    const FirstArg& sqrt_mu_first_arg() const { return sqrtmu_first_; }
    const SecondArg& sqrt_mu_second_arg() const { return sqrtmu_second_; }

    /// Pre-derivative accumulator for sums of Gamma pairs:
    ///   Gamma = sum_i d_i flux_i + direct
    struct GammaAccum {
        std::array<VelocityField, 3> flux;
        VelocityField direct;
    };
    GammaAccum zero_accum() const;
    void accumulate_pair(GammaAccum& acc, const FirstArg& fa, const SecondArg& sa,
                         Cplx scale) const;
    VelocityField finalize(const GammaAccum& acc) const;

    /// Gamma(f, g) = mu^{-1/2} Q(mu^{1/2} f, mu^{1/2} g), divergence form.
    VelocityField apply_gamma(const VelocityField& f, const VelocityField& g) const;

    /// L f = -Gamma(sqrt(mu), f) - Gamma(f, sqrt(mu)).
    VelocityField apply_linearized(const VelocityField& f) const;

    /// |w f|^2_D = sum_jm int w^2 { sigma^{jm} d_j f d_m conj(f)
    ///                              + sigma^{jm} v_j v_m f conj(f) / 4 } dv.
    double d_norm_sq(const VelocityField& f, const WeightSpec& w) const;

    /// Dense nodal matrix of L, assembled from the symmetric Dirichlet-form
    /// representation
    ///   (Lf, g) = 1/2 int int mu(v) mu(u) psi^{ij}(v-u)
    ///             [d_i(f/sqrt(mu))(v) - d_i(f/sqrt(mu))(u)]
    ///             [d_j(g/sqrt(mu))(v) - d_j(g/sqrt(mu))(u)] du dv,
    /// so it is self-adjoint w.r.t. the quadrature inner product and PSD by
    /// construction, and annihilates the collision invariants exactly (the
    /// stencils are exact on quadratics and psi(z) z = 0 holds per lattice
    /// offset). Agrees with the divergence-form apply to discretization order.
    /// Cached after first use.
    const Eigen::MatrixXd& dense_L() const;

    /// The symmetric PSD form matrix F with (Lf, g)_quad = f^T F g for real
    /// nodal fields; dense_L = diag(1/qw) F. Useful for SPD implicit solves
    /// (qw + dt F) and generalized eigenproblems.
    const Eigen::MatrixXd& dense_form() const;

    /// Quadratic-form matrix D with f^T D f = |w f|^2_D for real nodal f.
    Eigen::MatrixXd d_form_matrix(const WeightSpec& w) const;

  private:
    const VelocityGrid& grid_;
    double gamma_;
    std::unique_ptr<ConvEngine> conv_;
    std::array<std::size_t, 6> psi_id_;  // kernel ids, sym order
    std::array<std::vector<double>, 6> sigma_;
    FirstArg sqrtmu_first_;
    SecondArg sqrtmu_second_;
    VelocityField sqrt_mu_;
    mutable std::mutex dense_mutex_;
    mutable std::unique_ptr<Eigen::MatrixXd> dense_form_;
    mutable std::unique_ptr<Eigen::MatrixXd> dense_;

    void build_dense_locked() const;
};

}  // namespace kwnr

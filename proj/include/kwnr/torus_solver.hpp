#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "kwnr/boltzmann.hpp"
#include "kwnr/landau.hpp"
#include "kwnr/spectral_field.hpp"

namespace kwnr {

enum class Scheme { ExplicitRk2, ImexEuler, ImexStrang };
Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct TorusOptions {
    double dt = 0.01;
    Scheme scheme = Scheme::ExplicitRk2;
    bool nonlinear = true;
    /// Project the k = 0 collision right side onto the quadrature-orthogonal
    /// complement of the collision invariants, so mass / momentum / energy are
    /// conserved to integrator roundoff instead of quadrature order.
    bool conserve_correction = true;
    /// Modes with norm below cutoff * max_k norm are skipped in the
    /// convolution sum and the linearized apply.
    double mode_cutoff = 1e-14;
    /// If positive, restrict the evolution to nodes with |v| <= ball_radius
    /// (zero-extension outside). With the default divergence-form operator
    /// the truncated boundary stencil loses summation by parts and the mask
    /// itself seeds weakly unstable eigenvalues, so long-horizon masked runs
    /// must also set dirichlet_l.
    double ball_radius = 0.0;
    /// Use the symmetric Dirichlet-form matrix diag(1/qw) F for the implicit
    /// collision solves instead of the divergence-form apply. F is PSD, so
    /// the restricted generator cannot grow in the quadrature norm; this is
    /// the only stable choice for soft-potential runs at v_max > 6, where
    /// the divergence form has strongly unstable corner/boundary modes with
    /// or without a mask. Landau, linear, implicit schemes only.
    bool dirichlet_l = false;
};

/// Mode-by-mode evolution of d_t f_hat(k) + i (k.v) f_hat(k) + L f_hat(k)
///   = sum_l Gamma(f_hat(k-l), f_hat(l))
/// on the half-lattice SpectralField. Transport is applied exactly as the
/// pointwise phase rotation e^{-i (k.v) tau}; collision terms are advanced by
/// the chosen scheme. The Landau backend shares one FirstArg/SecondArg set per
/// mode across the whole convolution and folds L into the same accumulation;
/// implicit schemes (Landau only) use LU solves of (I + c L) with a dense
/// nodal matrix of the collision operator, batched over active modes. The
/// matrix is either the divergence-form apply (default; spectrally clean
/// unmasked at v_max = 6) or, with dirichlet_l, the provably dissipative
/// symmetric-form operator diag(1/qw) F needed for soft potentials on
/// larger boxes.
class TorusSolver {
  public:
    TorusSolver(const LandauModel& model, const TorusOptions& opt);
    /// Boltzmann backend: explicit scheme only (no dense form is assembled).
    TorusSolver(const BoltzmannModel& model, const TorusOptions& opt);

    const TorusOptions& options() const { return opt_; }

    void step(SpectralField& f) const;

    /// sum_l Gamma(f_hat(k - l), f_hat(l)) at a single k (diagnostic path,
    /// no mode cutoff, no conservation correction).
    VelocityField gamma_hat(const SpectralField& f, const KPoint& k) const;

    VelocityField apply_l(const VelocityField& f) const;

    /// -L f_hat(k) (+ Gamma convolution if nonlinear) for every stored mode;
    /// include_l = false gives the Gamma convolution alone. Exposed so the
    /// fast shared-FirstArg accumulation can be checked against gamma_hat.
    std::vector<VelocityField> collision_rhs(const SpectralField& f,
                                             bool include_l) const;

  private:
    const LandauModel* landau_ = nullptr;
    const BoltzmannModel* boltz_ = nullptr;
    const VelocityGrid& grid_;
    TorusOptions opt_;

    std::array<VelocityField, 5> inv_;
    Eigen::Matrix<double, 5, 5> inv_gram_;
    std::vector<char> mask_;        // empty when no ball restriction
    std::vector<std::size_t> keep_;  // nodes inside the ball (all, if no mask)

    void apply_mask(VelocityField& f) const;
    void init_invariants();

    mutable std::map<std::pair<KPoint, int>, std::vector<Cplx>> rot_cache_;
    mutable std::unique_ptr<Eigen::MatrixXd> ldense_;
    mutable std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    mutable double lu_coef_ = -1.0;

    const Eigen::MatrixXd& l_dense() const;

    void conserve_project(VelocityField& rhs0) const;
    void rotate(SpectralField& f, double tau) const;
    const std::vector<Cplx>& rotation(const KPoint& k, double tau, int slot) const;
    void implicit_solve(SpectralField& f, double coef,
                        const std::vector<VelocityField>* extra,
                        double extra_scale, bool crank_nicolson) const;
};

}  // namespace kwnr

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "kwnr/velocity_grid.hpp"
#include "kwnr/weight.hpp"

namespace kwnr {

/// Elastic post-collision pair
///   v' = (v+u)/2 + |v-u| sigma / 2,  u' = (v+u)/2 - |v-u| sigma / 2.
std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& u, const Vec3& sigma);

/// Non-cutoff Boltzmann collision model with kernel
///   B(v-u, sigma) = C_B |v-u|^gamma b(cos theta),   sin(theta) b = theta^{-1-2s},
/// supported on cos(theta) >= 0 and truncated at theta >= theta_min. The angular
/// integral uses Gauss-Legendre in theta on (theta_min, pi/2] times a uniform
/// azimuth rule; post-collision values are trilinear-interpolated on the grid
/// with zero extension outside the velocity box.
class BoltzmannModel {
  public:
    BoltzmannModel(const VelocityGrid& grid, double gamma, double s,
                   double theta_min = 0.1, double c_b = 1.0, int n_theta = 16,
                   int n_phi = 16);

    const VelocityGrid& grid() const { return grid_; }
    double gamma() const { return gamma_; }
    double s() const { return s_; }
    double theta_min() const { return theta_min_; }

    /// Gamma(f, g) = mu^{-1/2} Q(mu^{1/2} f, mu^{1/2} g); with mu(u')mu(v') =
    /// mu(u)mu(v) this reduces to the double quadrature
    ///   sum_{u,sigma} B sqrt(mu)(u) [f(u') g(v') - f(u) g(v)].
    VelocityField apply_gamma(const VelocityField& f, const VelocityField& g) const;

    /// L f = -Gamma(sqrt(mu), f) - Gamma(f, sqrt(mu)).
    VelocityField apply_linearized(const VelocityField& f) const;

    /// Batched L applications sharing one (v, u, sigma) geometry sweep.
    std::vector<VelocityField> apply_linearized_batch(
        const std::vector<VelocityField>& fields) const;

    /// |w f|^2_D = int B w^2(v) { mu(u) |f(v') - f(v)|^2
    ///                            + |f(u)|^2 (mu^{1/2}(v') - mu^{1/2}(v))^2 }.
    double d_norm_sq(const VelocityField& f, const WeightSpec& w) const;

    /// (L f, f) through the symmetrized Dirichlet representation
    ///   1/4 int int int B mu(u) mu(v) |h(v') + h(u') - h(v) - h(u)|^2,
    /// h = f / sqrt(mu); nonnegative by construction and exact on the
    /// invariants' mass/momentum components, so it is the right quadratic form
    /// for coercivity ratios (the divergence-form pairing carries an O(h^2)
    /// indefinite interpolation defect).
    double quadratic_form(const VelocityField& f) const;

    /// One combined sweep over the (v, u, sigma) quadrature producing, for a
    /// real basis {e_a}:
    ///   t1[a,b,d]   = (Gamma(e_a, e_b), e_d)      (flat index (a*m + b)*m + d)
    ///   g_d[a][b]   = the |.|_D polarization Gram  (w == 1)
    ///   g_dw[a][b]  = same with weight w (only if `w` is non-null)
    /// All later coercivity / trilinear sampling reduces to contractions of
    /// these against coefficient vectors, so the quadrature cost is paid once
    /// per (model, resolution).
    /// and g_lsym[a][b], the polarization Gram of `quadratic_form`.
    /// When `w` is non-null, t1w additionally carries the weighted pairing
    ///   t1w[a,b,d] = (Gamma(e_a, e_b), w^2 e_d).
    struct SweepResult {
        int m = 0;
        std::vector<double> t1;
        std::vector<double> t1w;
        Eigen::MatrixXd g_d;
        Eigen::MatrixXd g_dw;
        Eigen::MatrixXd g_lsym;
    };
    SweepResult basis_sweep(const std::vector<VelocityField>& basis,
                            const WeightSpec* w = nullptr, int workers = 1) const;

  private:
    const VelocityGrid& grid_;
    double gamma_, s_, theta_min_, c_b_;
    // flattened sphere quadrature: direction expressed in the (khat, e1, e2)
    // frame as (cth, sth*cos phi, sth*sin phi) with combined weight
    // c_b * theta^{-1-2s} * w_GL * 2 pi / n_phi
    struct SphereNode {
        double cth, sc, ss, w;
    };
    std::vector<SphereNode> sph_;
    double w_total_;  // sum of sphere weights

    // u-nodes with non-negligible sqrt(mu), precomputed
    struct UNode {
        std::size_t p;
        double smu, mu, qw;
    };
    std::vector<UNode> unodes_;
};

}  // namespace kwnr

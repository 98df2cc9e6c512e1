#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kwnr/boltzmann.hpp"
#include "kwnr/landau.hpp"
#include "kwnr/spectral_field.hpp"
#include "kwnr/weight.hpp"

namespace kwnr {

/// Empirical record of one functional inequality: the headline constant is the
/// min (coercivity) or max (trilinear) of the sampled ratio.
struct EstimateReport {
    std::string inequality;
    int n_samples = 0;
    int skipped = 0;  // degenerate samples (denominator below 1e-14)
    double constant = 0.0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    std::array<double, 3> quartiles{0.0, 0.0, 0.0};  // 25 / 50 / 75 %
    double aux = 0.0;  // secondary constant (upper ratio, or the C of the
                       // weighted inequality)
    std::string aux_name;
    int n_per_dim = 0;
    double v_max = 0.0;
    double gamma = 0.0;
    double s = -1.0;  // negative for Landau
    bool pass = false;

    std::string to_json() const;
};

/// min over micro-projected random samples of (L g, g) / |{I-P} g|_D^2.
/// Samples are standard-normal combinations of the first 20 Hermite-weighted
/// grid functions; the quadratic forms are evaluated through the symmetric
/// Dirichlet representations. The Boltzmann report also carries the upper
/// ratio max (two-sided bound) in `aux`.
EstimateReport estimate_coercivity(const LandauModel& model, int n_samples,
                                   std::uint64_t seed = 0);
/// `pre` may supply a precomputed flat-weight basis_sweep over
/// hermite_basis(grid, 20) so several estimates share one sweep.
EstimateReport estimate_coercivity(const BoltzmannModel& model, int n_samples,
                                   std::uint64_t seed = 0, int workers = 1,
                                   const BoltzmannModel::SweepResult* pre =
                                       nullptr);

/// Smallest nonzero generalized eigenvalue of the dense pencil
/// (Dirichlet form of L, D-norm form): the five invariant directions sit at
/// ~0 and are skipped. Independent cross-check of the sampled delta_0.
double coercivity_gevp(const LandauModel& model);

/// Largest delta_q with a finite C such that
///   (L g, w^2 g) >= delta_q |w g|_D^2 - C |g|^2_{L^2(B_R)}
/// holds over the samples: delta_q is the ratio min over far-field samples
/// (supported outside B_R, where the C-term is inactive) and C (in `aux`) is
/// the smallest compensating constant making the inequality hold for all
/// interior samples with that delta_q.
EstimateReport verify_weighted_coercivity(const LandauModel& model,
                                          const WeightSpec& w, double R,
                                          int n_samples,
                                          std::uint64_t seed = 0);
EstimateReport verify_weighted_coercivity(const BoltzmannModel& model,
                                          const WeightSpec& w, double R,
                                          int n_samples,
                                          std::uint64_t seed = 0);

/// max over random (f, g, h) of |(Gamma(f, g), w^2 h)| / (||w f|| |w g|_D |w h|_D).
/// The Boltzmann flat-weight path contracts the precomputed trilinear tensor
/// of one basis sweep; all other paths apply Gamma per sample.
EstimateReport sample_trilinear_constant(const LandauModel& model,
                                         const WeightSpec& w, int n_samples,
                                         std::uint64_t seed = 0);
EstimateReport sample_trilinear_constant(const BoltzmannModel& model,
                                         const WeightSpec& w, int n_samples,
                                         std::uint64_t seed = 0,
                                         int workers = 1,
                                         const BoltzmannModel::SweepResult*
                                             pre = nullptr);

/// Banach-algebra check on lattice sequences:
///   lhs = sum_k |sum_l a(k-l) b(l)|, rhs = (sum |a|)(sum |b|), lhs <= rhs.
std::pair<double, double> wiener_convolution_check(
    const std::vector<Cplx>& a, const std::vector<Cplx>& b);

/// sum_k <k>^m || w f_hat(k) ||_{L^2_v} (conjugate modes counted), with
/// <k> = sqrt(1 + |k|^2).
double high_order_norm(const SpectralField& field, int m, const WeightSpec& w);

}  // namespace kwnr

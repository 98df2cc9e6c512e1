#pragma once

#include <utility>
#include <vector>

#include "kwnr/spectral_field.hpp"
#include "kwnr/weight.hpp"

namespace kwnr {

/// Fit of the sub-exponential envelope value ~ C exp(-lambda t^kappa).
struct DecayFit {
    double c = 1.0;
    double lambda = 0.0;   // clamped at 0; `flagged` records a clamp
    double kappa = 1.0;    // in [0.1, 1.5]
    double rss = 0.0;      // residual sum of squares in log space
    std::pair<double, double> window{0.0, 0.0};
    /// kappa is not identified: the exponent landed on the search boundary,
    /// the objective is flat (constant series), or lambda was clamped.
    bool flagged = false;
};

/// Theoretical decay exponent:
///   hard ranges -> 1;
///   soft Landau -> theta / (theta + |gamma + 2|);
///   soft Boltzmann -> theta / (theta + |gamma + 2 s|).
/// Throws if the weight hypothesis is violated (soft ranges need q > 0).
double kappa_theory(ModelKind kind, double gamma, double s,
                    const WeightSpec& w);

/// Least squares of log(value) ~ log C - lambda t^kappa on the window:
/// linear solve for (log C, lambda) at fixed kappa, golden-section search
/// over kappa in [0.1, 1.5]. Needs >= 10 positive samples with t_lo > 0.
DecayFit fit_subexponential(
    const std::vector<std::pair<double, double>>& series,
    std::pair<double, double> window);

inline std::pair<double, double> default_fit_window(double t_final) {
    return {0.2 * t_final, t_final};
}

/// L^1_k L^2_v mass of the field on {<v> <= rho t^p_prime} and its complement
/// (per-mode quadratic split, conjugate modes counted).
std::pair<double, double> splitting_diagnostic(const SpectralField& field,
                                               double t, double rho,
                                               double p_prime);

}  // namespace kwnr

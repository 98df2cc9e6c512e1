#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kwnr/decay.hpp"

using namespace kwnr;

TEST_CASE("kappa theory: exact rationals and case split") {
    WeightSpec flat;
    CHECK(kappa_theory(ModelKind::Landau, 0.0, -1.0, flat) == 1.0);
    CHECK(kappa_theory(ModelKind::Landau, -2.0, -1.0, flat) == 1.0);
    CHECK(kappa_theory(ModelKind::Boltzmann, -1.0, 0.5, flat) == 1.0);

    WeightSpec w2;
    w2.q = 0.5;
    w2.theta = 2.0;
    w2.gamma = -3.0;
    CHECK(kappa_theory(ModelKind::Landau, -3.0, -1.0, w2) == 2.0 / 3.0);

    WeightSpec w1 = w2;
    w1.theta = 1.0;
    w1.gamma = -2.5;
    CHECK(kappa_theory(ModelKind::Landau, -2.5, -1.0, w1) == 2.0 / 3.0);

    WeightSpec wb;
    wb.q = 0.5;
    wb.theta = 1.0;
    wb.model_kind = ModelKind::Boltzmann;
    wb.gamma = -1.0;
    wb.s = 0.25;
    CHECK(kappa_theory(ModelKind::Boltzmann, -1.0, 0.25, wb) == 2.0 / 3.0);

    // soft range without exponential weight violates the hypothesis
    CHECK_THROWS(kappa_theory(ModelKind::Landau, -3.0, -1.0, flat));

    // continuity inside the soft range, jump only at the boundary
    double ka = kappa_theory(ModelKind::Landau, -2.1, -1.0, w2);
    double kb = kappa_theory(ModelKind::Landau, -2.1001, -1.0, w2);
    CHECK(std::abs(ka - kb) < 1e-3);
    CHECK(ka < 1.0);
}

TEST_CASE("subexponential fit recovers constructed envelopes") {
    auto sample = [](double lambda, double kappa, double c) {
        std::vector<std::pair<double, double>> s;
        for (int i = 0; i <= 200; ++i) {
            double t = 1.0 + 49.0 * i / 200.0;
            s.push_back({t, c * std::exp(-lambda * std::pow(t, kappa))});
        }
        return s;
    };

    auto f1 = fit_subexponential(sample(0.5, 2.0 / 3.0, 1.0), {1.0, 50.0});
    CHECK(std::abs(f1.lambda - 0.5) < 1e-3);
    CHECK(std::abs(f1.kappa - 2.0 / 3.0) < 1e-3);
    CHECK(!f1.flagged);
    CHECK(f1.rss < 1e-10);

    auto f2 = fit_subexponential(sample(1.0, 1.0, 2.0), {1.0, 50.0});
    CHECK(std::abs(f2.lambda - 1.0) < 1e-3);
    CHECK(std::abs(f2.kappa - 1.0) < 1e-3);
    CHECK(std::abs(f2.c - 2.0) < 1e-2);

    // scale equivariance: C moves, (lambda, kappa) do not
    auto scaled = sample(0.5, 2.0 / 3.0, 1.0);
    for (auto& [t, v] : scaled) v *= 7.0;
    auto f3 = fit_subexponential(scaled, {1.0, 50.0});
    CHECK(std::abs(f3.lambda - f1.lambda) < 1e-9);
    CHECK(std::abs(f3.kappa - f1.kappa) < 1e-9);
    CHECK(f3.c == doctest::Approx(7.0 * f1.c).epsilon(1e-8));

    // constant series: lambda ~ 0, kappa unidentified and flagged
    std::vector<std::pair<double, double>> flat;
    for (int i = 0; i <= 50; ++i) flat.push_back({1.0 + i, 3.0});
    auto f4 = fit_subexponential(flat, {1.0, 51.0});
    CHECK(f4.lambda < 1e-10);
    CHECK(f4.flagged);
    CHECK(std::isfinite(f4.kappa));

    CHECK_THROWS(fit_subexponential(flat, {0.0, 51.0}));   // t_lo = 0
    CHECK_THROWS(fit_subexponential(flat, {10.0, 10.0}));  // empty window
    std::vector<std::pair<double, double>> neg = {{1.0, 1.0}, {2.0, -1.0}};
    CHECK_THROWS(fit_subexponential(neg, {0.5, 3.0}));
    std::vector<std::pair<double, double>> few = {{1.0, 1.0}, {2.0, 0.5}};
    CHECK_THROWS(fit_subexponential(few, {0.5, 3.0}));
}

TEST_CASE("splitting diagnostic") {
    VelocityGrid g(8, 6.0);
    auto f = init_field("random_micro", 1.0, 1, g, 9);

    // cut beyond the grid: everything is in the low part
    double vcorner = std::sqrt(1.0 + 3.0 * 36.0);
    auto [lo1, hi1] = splitting_diagnostic(f, 100.0, vcorner, 1.0);
    CHECK(hi1 == 0.0);
    CHECK(lo1 == doctest::Approx(f.l1k_l2v()).epsilon(1e-12));

    // cut below <v> >= 1: everything is high
    auto [lo2, hi2] = splitting_diagnostic(f, 1e-6, 1.0, 1.0);
    CHECK(lo2 == 0.0);
    CHECK(hi2 == doctest::Approx(f.l1k_l2v()).epsilon(1e-12));

    // interior cut: per-mode quadratic consistency with the full norm
    auto [lo3, hi3] = splitting_diagnostic(f, 1.0, 3.0, 0.5);
    CHECK(lo3 > 0.0);
    CHECK(hi3 > 0.0);
    // each mode splits disjointly, so the combined norm dominates and the
    // triangle inequality bounds the sum
    CHECK(std::sqrt(lo3 * lo3 + hi3 * hi3) <= f.l1k_l2v() * (1.0 + 1e-12));
    CHECK(lo3 + hi3 >= f.l1k_l2v() * (1.0 - 1e-12));

    SpectralField zero(g, 1);
    auto [lz, hz] = splitting_diagnostic(zero, 1.0, 1.0, 1.0);
    CHECK(lz == 0.0);
    CHECK(hz == 0.0);

    CHECK_THROWS(splitting_diagnostic(f, 0.0, 1.0, 1.0));
    CHECK_THROWS(splitting_diagnostic(f, 1.0, -1.0, 1.0));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kwnr/macro_micro.hpp"
#include "kwnr/spectral_field.hpp"
#include "test_util.hpp"

using namespace kwnr;

TEST_CASE("macro extraction: exact on span fields") {
    VelocityGrid g(16, 8.0);
    auto smu = g.sqrt_maxwellian();
    auto m0 = extract_macro(g, smu);
    CHECK(std::abs(m0.a - 1.0) < 1e-12);
    for (int d = 0; d < 3; ++d) CHECK(std::abs(m0.b[d]) < 1e-12);
    CHECK(std::abs(m0.c) < 1e-12);

    // |v|^2 sqrt(mu) = 3 sqrt(mu) + 2 ((|v|^2-3)/2) sqrt(mu), in-span so the
    // Gram solve recovers the coefficients to roundoff
    VelocityField f(g.num_nodes());
    const auto& nodes = g.nodes();
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        const auto& v = nodes[p];
        f[p] = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * smu[p];
    }
    auto m1 = extract_macro(g, f);
    CHECK(std::abs(m1.a - 3.0) < 1e-10);
    CHECK(std::abs(m1.c - 2.0) < 1e-10);
}

TEST_CASE("projection: idempotent, micro part quadrature-orthogonal") {
    VelocityGrid g(12, 8.0);
    std::mt19937 rng(11);
    auto f = testutil::random_decaying_field(g, rng);
    auto pf = project_P(g, f);
    auto ppf = project_P(g, pf);
    double d = 0.0;
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        d = std::max(d, std::abs(ppf[p] - pf[p]));
    CHECK(d < 1e-12);

    auto mic = micro_part(g, f);
    auto inv = g.collision_invariants();
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(g.inner_product(mic, inv[i])) < 1e-10);
}

TEST_CASE("theta and lambda moments against Gaussian-moment oracles") {
    VelocityGrid g(16, 8.0);
    auto smu = g.sqrt_maxwellian();
    const auto& nodes = g.nodes();

    // Theta(sqrt(mu)) = 0 since int (v_i v_j - delta_ij) mu = 0
    auto th0 = theta_moment(g, smu);
    CHECK(th0.cwiseAbs().maxCoeff() < 1e-5);

    // Theta of v1 v2 sqrt(mu): only the (1,2) pair survives, value <v1^2><v2^2> = 1
    VelocityField f(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        f[p] = nodes[p][0] * nodes[p][1] * smu[p];
    auto th1 = theta_moment(g, f);
    CHECK(std::abs(th1(0, 1) - 1.0) < 1e-5);
    CHECK(std::abs(th1(1, 0) - 1.0) < 1e-5);
    CHECK(std::abs(th1(0, 0)) < 1e-5);
    CHECK(std::abs(th1(2, 2)) < 1e-5);

    // Lambda(sqrt(mu)) = 0 (odd), Lambda of v_1 sqrt(mu) = 0 since
    // E[v1^2 |v|^2] = 5; Lambda_1 of ((|v|^2-3)/2) v1 sqrt(mu) = 1/2
    CHECK(lambda_moment(g, smu).cwiseAbs().maxCoeff() < 1e-6);
    VelocityField f1(g.num_nodes()), f2(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        const auto& v = nodes[p];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        f1[p] = v[0] * smu[p];
        f2[p] = 0.5 * (r2 - 3.0) * v[0] * smu[p];
    }
    CHECK(lambda_moment(g, f1).cwiseAbs().maxCoeff() < 1e-5);
    auto lam = lambda_moment(g, f2);
    CHECK(std::abs(lam(0) - 0.5) < 1e-4);
    CHECK(std::abs(lam(1)) < 1e-6);
}

TEST_CASE("spectral field: half lattice, conjugate completion, norms") {
    VelocityGrid g(8, 8.0);
    SpectralField field(g, 2);
    CHECK(field.num_stored() == 63);  // (5^3 - 1)/2 + 1

    // every lattice point is reachable through exactly one of k / -k
    int count = 0;
    for (int kx = -2; kx <= 2; ++kx)
        for (int ky = -2; ky <= 2; ++ky)
            for (int kz = -2; kz <= 2; ++kz) {
                KPoint k{kx, ky, kz};
                bool s = field.stored_index(k) >= 0;
                bool sn = field.stored_index(k_neg(k)) >= 0;
                CHECK((s || sn));
                if (s) ++count;
            }
    CHECK(count == 63);

    std::mt19937 rng(3);
    auto f = testutil::random_decaying_field(g, rng);
    KPoint k{1, -1, 2};
    field.mode(static_cast<std::size_t>(field.stored_index(k))) = f;
    auto fm = field.mode_at(k_neg(k));
    double d = 0.0;
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        d = std::max(d, std::abs(fm[p] - std::conj(f[p])));
    CHECK(d < 1e-15);

    // conjugate modes are counted in the summed norm
    CHECK(field.l1k_l2v() == doctest::Approx(2.0 * g.norm_l2(f)));
    WeightSpec flat{0.0, 2.0, ModelKind::Landau, 0.0, 0.5};
    CHECK(field.l1k_l2v_weighted(flat) == doctest::Approx(field.l1k_l2v()));
}

TEST_CASE("presets: conjugate symmetry and zero conservation functionals") {
    VelocityGrid g(8, 8.0);
    for (const char* preset : {"single_mode_micro", "random_micro", "macro_wave"}) {
        auto field = init_field(preset, 1e-2, 2, g, 42);
        INFO("preset = ", preset);
        CHECK(field.conjugate_defect() < 1e-14);
        auto c = conservation_functionals(field);
        CHECK(std::abs(c.mass) < 1e-10);
        for (int d = 0; d < 3; ++d) CHECK(std::abs(c.momentum[d]) < 1e-10);
        CHECK(std::abs(c.energy) < 1e-10);
        CHECK(field.l1k_l2v() > 0.0);
    }
    CHECK_THROWS(init_field("bogus", 1.0, 2, g));
    // micro presets have no macroscopic component in any mode
    auto field = init_field("random_micro", 1e-2, 1, g, 7);
    for (std::size_t i = 0; i < field.num_stored(); ++i) {
        auto m = extract_macro(g, field.mode(i));
        CHECK(std::abs(m.a) < 1e-12);
        CHECK(std::abs(m.c) < 1e-12);
    }
}

TEST_CASE("transport term: skew pairing and norm preservation") {
    VelocityGrid g(8, 8.0);
    std::mt19937 rng(9);
    auto f = testutil::random_decaying_field(g, rng);
    KPoint k{2, 0, -1};
    auto tf = transport_term(k, f, g);
    // (T f, f) is purely imaginary: multiplication by -i(k.v)
    CHECK(std::abs(g.inner_product(tf, f).real()) < 1e-12);
    CHECK(g.norm_l2(tf) > 0.0);
}

TEST_CASE("norm accumulators: sup and trapezoid dissipation integral") {
    VelocityGrid g(8, 8.0);
    SpectralField field(g, 1);
    std::mt19937 rng(17);
    auto f = testutil::random_decaying_field(g, rng);
    KPoint k{1, 0, 0};
    field.mode(static_cast<std::size_t>(field.stored_index(k))) = f;

    WeightSpec flat{0.0, 2.0, ModelKind::Landau, 0.0, 0.5};
    auto dsq = [&](const VelocityField& h) {
        double v = g.norm_l2(h);
        return v * v;
    };
    NormAccumulators acc;
    acc.record(field, 0.0, flat, dsq);
    acc.record(field, 0.5, flat, dsq);
    acc.record(field, 1.0, flat, dsq);
    double nrm = g.norm_l2(f);
    CHECK(acc.x_t() == doctest::Approx(2.0 * nrm));
    CHECK(acc.x_t_weighted() == doctest::Approx(2.0 * nrm));
    // constant-in-time field: sum_k sqrt(int |f|^2 dt) = 2 |f| over [0,1]
    CHECK(acc.dissipation() == doctest::Approx(2.0 * nrm));
}

TEST_CASE("moment system residual: free transport trajectory") {
    VelocityGrid g(12, 7.0);
    const double dt = 0.01;
    auto base = init_field("macro_wave", 1.0, 1, g, 0);
    const auto& nodes = g.nodes();
    // exact free-transport evolution f_hat(k, t) = e^{-i (k.v) t} f_hat(k, 0)
    std::vector<SpectralField> traj;
    for (int j = 0; j < 3; ++j) {
        SpectralField ft = base;
        double t = j * dt;
        for (std::size_t i = 0; i < ft.num_stored(); ++i) {
            const KPoint& k = ft.keys()[i];
            auto& m = ft.mode(i);
            for (std::size_t p = 0; p < g.num_nodes(); ++p) {
                double kv = k[0] * nodes[p][0] + k[1] * nodes[p][1] +
                            k[2] * nodes[p][2];
                m[p] *= std::exp(Cplx{0.0, -kv * t});
            }
        }
        traj.push_back(std::move(ft));
    }
    double res = moment_system_residual(traj, dt);
    INFO("residual = ", res);
    // only the centered-difference O(dt^2) error survives for exact transport
    CHECK(res < 1e-2);
    CHECK_THROWS(moment_system_residual({base}, dt));
}

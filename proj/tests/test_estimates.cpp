#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "kwnr/basis.hpp"
#include "kwnr/estimates.hpp"

using namespace kwnr;

TEST_CASE("wiener convolution inequality") {
    // single spikes: equality
    auto [l1, r1] = wiener_convolution_check({Cplx{0.0, 2.0}}, {Cplx{-3.0, 0.0}});
    CHECK(l1 == doctest::Approx(r1));
    CHECK(r1 == doctest::Approx(6.0));

    // nonnegative sequences: no cancellation, equality
    auto [l2, r2] = wiener_convolution_check({Cplx{1.0, 0.0}, Cplx{2.0, 0.0}},
                                             {Cplx{0.5, 0.0}, Cplx{3.0, 0.0}});
    CHECK(l2 == doctest::Approx(r2));

    // random complex: inequality, generally strict
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    int strict = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Cplx> a(8), b(13);
        for (auto& z : a) z = Cplx{g(rng), g(rng)};
        for (auto& z : b) z = Cplx{g(rng), g(rng)};
        auto [lhs, rhs] = wiener_convolution_check(a, b);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
        if (lhs < 0.99 * rhs) ++strict;
    }
    CHECK(strict > 90);

    auto [lz, rz] = wiener_convolution_check({}, {Cplx{1.0, 0.0}});
    CHECK(lz == 0.0);
    CHECK(rz == 0.0);
}

TEST_CASE("high order norm") {
    VelocityGrid g(8, 6.0);
    WeightSpec flat;
    auto f = init_field("random_micro", 1.0, 1, g, 3);
    CHECK(high_order_norm(f, 0, flat) ==
          doctest::Approx(f.l1k_l2v()).epsilon(1e-12));

    // single mode at k = (1, 1, 0), unit L2 norm: <k>^2 = 3
    SpectralField sf(g, 1);
    int idx = sf.stored_index({1, 1, 0});
    REQUIRE(idx >= 0);
    auto smu = g.sqrt_maxwellian();
    double nrm = g.norm_l2(smu);
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        sf.mode(static_cast<std::size_t>(idx))[p] = smu[p] / nrm;
    CHECK(high_order_norm(sf, 2, flat) == doctest::Approx(2.0 * 3.0));

    CHECK(high_order_norm(f, 2, flat) >= high_order_norm(f, 1, flat));
    CHECK(high_order_norm(f, 1, flat) >= high_order_norm(f, 0, flat));
}

TEST_CASE("landau coercivity: positive, cross-checked against the pencil") {
    VelocityGrid g(8, 6.0);
    LandauModel model(g, 0.0);
    CHECK_THROWS(estimate_coercivity(model, 50));

    auto rep = estimate_coercivity(model, 300, 1);
    INFO(rep.to_json());
    CHECK(rep.pass);
    CHECK(rep.constant > 0.0);
    CHECK(rep.constant == rep.ratio_min);
    CHECK(rep.quartiles[0] <= rep.quartiles[1]);
    CHECK(rep.quartiles[1] <= rep.quartiles[2]);
    CHECK(rep.skipped < 30);
    CHECK(std::isfinite(rep.ratio_max));

    // the sampled min over the 20-dim subspace dominates the global smallest
    // nonzero generalized eigenvalue
    double gevp = coercivity_gevp(model);
    INFO("gevp = ", gevp, " sampled min = ", rep.constant);
    CHECK(gevp > 0.0);
    CHECK(rep.constant > 0.8 * gevp);

    auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j["inequality"] == "landau_coercivity");
    CHECK(j["n_per_dim"] == 8);
    CHECK(!j.contains("s"));
}

TEST_CASE("boltzmann coercivity: two-sided ratio") {
    VelocityGrid g(8, 6.0);
    BoltzmannModel model(g, 0.0, 0.5, 0.3);
    auto rep = estimate_coercivity(model, 300, 2);
    INFO(rep.to_json());
    CHECK(rep.pass);
    CHECK(rep.constant > 0.0);
    CHECK(rep.aux_name == "upper_ratio");
    CHECK(rep.aux >= rep.constant);
    CHECK(rep.aux < 1e3);
    CHECK(rep.constant > 1e-3);
    auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j.contains("s"));

    // a shared flat-weight sweep reproduces the internally swept estimates
    WeightSpec flat;
    auto sweep = model.basis_sweep(hermite_basis(g, 20), &flat);
    auto rep2 = estimate_coercivity(model, 300, 2, 1, &sweep);
    CHECK(rep2.constant == doctest::Approx(rep.constant).epsilon(1e-12));
    auto tri = sample_trilinear_constant(model, flat, 100, 9);
    auto tri2 = sample_trilinear_constant(model, flat, 100, 9, 1, &sweep);
    CHECK(tri2.constant == doctest::Approx(tri.constant).epsilon(1e-12));
}

TEST_CASE("weighted coercivity") {
    VelocityGrid g(8, 6.0);
    LandauModel hard(g, 0.0);
    WeightSpec flat;
    auto rep = verify_weighted_coercivity(hard, flat, 5.0, 150, 3);
    INFO(rep.to_json());
    CHECK(rep.constant > 0.0);
    CHECK(rep.aux_name == "C");
    CHECK(rep.aux >= 0.0);
    CHECK(std::isfinite(rep.aux));
    CHECK(rep.pass);

    // theta = 1: at this resolution a theta = 2 weight changes by ~e^5
    // between adjacent cells near the box edge and the discrete commutator
    // swamps the pairing
    LandauModel soft(g, -3.0);
    WeightSpec w;
    w.q = 0.5;
    w.theta = 1.0;
    w.gamma = -3.0;
    auto wrep = verify_weighted_coercivity(soft, w, 5.0, 150, 3);
    INFO(wrep.to_json());
    CHECK(std::isfinite(wrep.constant));
    CHECK(std::isfinite(wrep.aux));
    CHECK(wrep.constant > 0.0);

    BoltzmannModel bmodel(g, -1.0, 0.25, 0.3);
    auto brep = verify_weighted_coercivity(bmodel, flat, 5.0, 100, 4);
    INFO(brep.to_json());
    CHECK(std::isfinite(brep.constant));
    CHECK(std::isfinite(brep.aux));
}

TEST_CASE("landau trilinear: finite and stable across resolutions") {
    WeightSpec flat;
    VelocityGrid g8(8, 6.0);
    LandauModel m8(g8, 0.0);
    auto r8 = sample_trilinear_constant(m8, flat, 150, 5);
    INFO(r8.to_json());
    CHECK(r8.pass);
    CHECK(r8.constant > 0.0);
    CHECK(std::isfinite(r8.constant));

    VelocityGrid g12(12, 6.0);
    LandauModel m12(g12, 0.0);
    auto r12 = sample_trilinear_constant(m12, flat, 150, 5);
    INFO("c8 = ", r8.constant, " c12 = ", r12.constant);
    CHECK(r12.constant < 2.0 * r8.constant);
    CHECK(r12.constant > 0.5 * r8.constant);

    // ratios are scale invariant: same seed, soft model, still finite
    LandauModel soft(g8, -3.0);
    auto rs = sample_trilinear_constant(soft, flat, 150, 5);
    CHECK(rs.constant > 0.0);
    CHECK(std::isfinite(rs.constant));
}

TEST_CASE("boltzmann trilinear: sweep contraction matches direct applies") {
    VelocityGrid g(8, 6.0);
    BoltzmannModel model(g, 0.0, 0.5, 0.3);
    WeightSpec flat;
    auto rep = sample_trilinear_constant(model, flat, 200, 6);
    INFO(rep.to_json());
    CHECK(rep.pass);
    CHECK(rep.constant > 0.0);
    CHECK(std::isfinite(rep.constant));

    WeightSpec w;
    w.q = 0.1;
    w.theta = 1.0;
    w.model_kind = ModelKind::Boltzmann;
    w.gamma = -1.0;
    w.s = 0.25;
    BoltzmannModel soft(g, -1.0, 0.25, 0.3);
    auto wrep = sample_trilinear_constant(soft, w, 100, 7);
    INFO(wrep.to_json());
    CHECK(wrep.constant > 0.0);
    CHECK(std::isfinite(wrep.constant));

    // t1w oracle: flat weight reproduces t1; weighted entry matches one
    // direct Gamma apply paired against w^2 e_d
    auto basis = hermite_basis(g, 6);
    auto swf = model.basis_sweep(basis, &flat);
    double dmax = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < swf.t1.size(); ++i) {
        dmax = std::max(dmax, std::abs(swf.t1[i] - swf.t1w[i]));
        scale = std::max(scale, std::abs(swf.t1[i]));
    }
    CHECK(dmax < 1e-12 * scale);

    auto sww = soft.basis_sweep(basis, &w);
    auto gam = soft.apply_gamma(basis[1], basis[2]);
    auto wfield = weight_field(g, w);
    VelocityField w2e(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        w2e[p] = wfield[p].real() * wfield[p].real() * basis[3][p];
    double direct = g.inner_product(gam, w2e).real();
    double tens = sww.t1w[(1 * 6 + 2) * 6 + 3];
    INFO("direct ", direct, " tensor ", tens);
    CHECK(std::abs(direct - tens) < 1e-8 + 1e-6 * std::abs(direct));
}

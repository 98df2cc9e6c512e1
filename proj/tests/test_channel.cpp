#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "kwnr/channel.hpp"
#include "kwnr/macro_micro.hpp"

using namespace kwnr;

TEST_CASE("transverse half-lattice bookkeeping") {
    CHECK(kbar_keys(0).size() == 1);
    CHECK(kbar_keys(1).size() == 5);
    CHECK(kbar_keys(2).size() == 13);

    VelocityGrid g(8, 2.0);
    ChannelState st(g, 8, 2);
    CHECK(st.num_stored() == 13);
    CHECK(st.stored_index({0, 0}) >= 0);
    CHECK(st.stored_index({2, -1}) >= 0);
    CHECK(st.stored_index({-1, 0}) == -1);  // conjugate, not stored
    CHECK(st.in_truncation({-2, 2}));
    CHECK_FALSE(st.in_truncation({3, 0}));
    CHECK(st.x1_node(0) == doctest::Approx(-1.0 + 0.125));
    CHECK(st.x1_node(7) == doctest::Approx(1.0 - 0.125));
    CHECK(st.x1_node(3) == doctest::Approx(-st.x1_node(4)));
}

TEST_CASE("zero state with zero inflow stays zero") {
    VelocityGrid g(8, 2.0);
    LandauModel model(g, 0.0);
    ChannelState st(g, 8, 1);
    auto bd = make_boundary_preset("zero", 0.0, 1, g);

    ChannelOptions opt;
    opt.dt = 0.01;
    opt.bc = ChannelBC::Inflow;
    ChannelSolver solver(model, opt);
    for (int s = 0; s < 5; ++s) solver.step(st, s * opt.dt, &bd);
    CHECK(st.l1kbar_norm() == 0.0);
}

TEST_CASE("collisionless transport matches characteristics at 2nd order") {
    VelocityGrid g(8, 2.0);
    LandauModel model(g, 0.0);
    auto smu = g.sqrt_maxwellian();
    const double T = 0.2;

    auto run = [&](int nx) {
        ChannelState st(g, nx, 0);
        // bump supported away from both walls: no wall crossing by time T
        for (int i = 0; i < nx; ++i) {
            double x = st.x1_node(i);
            double bump = std::exp(-20.0 * x * x);
            auto& f = st.slab(0)[static_cast<std::size_t>(i)];
            for (std::size_t p = 0; p < g.num_nodes(); ++p)
                f[p] = bump * smu[p];
        }
        auto bd = make_boundary_preset("zero", 0.0, 0, g);
        ChannelOptions opt;
        opt.dt = 0.2 / nx;  // CFL = dt vmax / h = 0.4
        opt.bc = ChannelBC::Inflow;
        opt.collision = false;
        ChannelSolver solver(model, opt);
        int steps = static_cast<int>(std::lround(T / opt.dt));
        for (int s = 0; s < steps; ++s) solver.step(st, s * opt.dt, &bd);

        double err = 0.0;
        for (int i = 0; i < nx; ++i) {
            double x = st.x1_node(i);
            const auto& f = st.slab(0)[static_cast<std::size_t>(i)];
            for (std::size_t p = 0; p < g.num_nodes(); ++p) {
                double xs = x - g.nodes()[p][0] * T;
                double exact =
                    (xs > -1.0 && xs < 1.0)
                        ? std::exp(-20.0 * xs * xs) * smu[p].real()
                        : 0.0;
                err = std::max(err, std::abs(f[p] - exact));
            }
        }
        return err;
    };

    double e32 = run(32);
    double e64 = run(64);
    INFO("errors ", e32, " / ", e64);
    CHECK(e32 < 0.02);
    CHECK(e32 > 2.5 * e64);  // ~2nd order in h (dt tied to h)
}

TEST_CASE("constant maxwell inflow fills the wall cells; F stays positive") {
    VelocityGrid g(8, 2.0);
    LandauModel model(g, 0.0);
    double amp = 0.2;
    auto bd = make_boundary_preset("maxwell_pulse", amp, 0, g);

    ChannelState st(g, 32, 0);
    ChannelOptions opt;
    opt.dt = 0.01;
    opt.bc = ChannelBC::Inflow;
    opt.collision = false;
    ChannelSolver solver(model, opt);
    for (int s = 0; s < 400; ++s) solver.step(st, s * opt.dt, &bd);

    auto mu = g.maxwellian();
    auto smu = g.sqrt_maxwellian();
    const auto& f0 = st.slab(0)[0];  // wall-adjacent cell, x1 = -1 + h/2
    double minF = 0.0;
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        double v1 = g.nodes()[p][0];
        if (v1 > 0.0) {
            // incoming values have relaxed to the boundary data
            CHECK(std::abs(f0[p] - amp * smu[p]) < 0.05 * amp);
        }
        for (int i = 0; i < st.n_x1(); ++i) {
            const auto& f = st.slab(0)[static_cast<std::size_t>(i)];
            double F = mu[p].real() + smu[p].real() * f[p].real();
            minF = std::min(minF, F);
        }
    }
    CHECK(minF > -1e-10);
}

TEST_CASE("specular run preserves the reflection symmetry") {
    VelocityGrid g(8, 6.0);
    LandauModel model(g, 0.0);
    auto st = channel_init("symmetric_micro", 1.0, 16, 1, g);
    CHECK(symmetry_defect(st) < 1e-14);
    CHECK(st.conjugate_defect() < 1e-14);

    ChannelOptions opt;
    opt.dt = 0.005;
    opt.bc = ChannelBC::Specular;
    opt.ball_radius = 6.0;
    ChannelSolver solver(model, opt);

    int steps = 50;
    for (int s = 0; s < steps; ++s) solver.step(st, s * opt.dt);
    double d = symmetry_defect(st);
    INFO("defect after ", steps, " steps: ", d);
    CHECK(d < 1e-10 * steps);
    CHECK(std::isfinite(st.l1kbar_norm()));
    CHECK(st.l1kbar_norm() > 0.0);
    CHECK(st.conjugate_defect() < 1e-12);
}

TEST_CASE("boundary functional E: zero data, linear scaling, sample guard") {
    VelocityGrid g(8, 2.0);
    LandauModel model(g, 0.0);

    auto zero = make_boundary_preset("zero", 0.0, 1, g);
    CHECK(boundary_functional_E(zero, model, 1) == 0.0);

    // at tiny amplitude the quadratic trace is negligible: doubling the data
    // quadruples every trace, so E (a sum of square roots) doubles
    double a = 1e-6;
    auto g1 = make_boundary_preset("maxwell_pulse", a, 1, g);
    auto g2 = make_boundary_preset("maxwell_pulse", 2.0 * a, 1, g);
    double e1 = boundary_functional_E(g1, model, 1);
    double e2 = boundary_functional_E(g2, model, 1);
    CHECK(e1 > 0.0);
    CHECK(e2 / e1 == doctest::Approx(2.0).epsilon(1e-4));

    // <kbar>^m weighting only increases E
    CHECK(boundary_functional_E(g1, model, 1, 2) >= e1);

    auto two = g1;
    two.minus.push_back(two.minus[0]);
    two.plus.push_back(two.plus[0]);
    two.dt = 0.1;
    CHECK_THROWS(boundary_functional_E(two, model, 1));
}

TEST_CASE("boundary x1-derivative trace matches the direct formula") {
    VelocityGrid g(8, 2.0);
    LandauModel model(g, 0.0);
    double a = 0.3;
    auto bd = make_boundary_preset("maxwell_pulse", a, 1, g);

    auto traces = boundary_x1_derivative(bd, model, 1);
    auto keys = kbar_keys(1);
    REQUIRE(traces.size() == keys.size());

    for (std::size_t ki = 0; ki < keys.size(); ++ki) {
        const auto& gm = bd.minus[0][ki];
        auto lf = model.apply_linearized(gm);
        auto gf = model.apply_gamma(gm, gm);
        double d = 0.0;
        for (std::size_t p = 0; p < g.num_nodes(); ++p) {
            double v1 = g.nodes()[p][0];
            if (v1 <= 0.0) {
                CHECK(std::abs(traces[ki][0][p]) == 0.0);
                continue;
            }
            const Vec3& v = g.nodes()[p];
            Cplx kv{0.0, keys[ki][0] * v[1] + keys[ki][1] * v[2]};
            Cplx expect = -(kv * gm[p] + lf[p] - gf[p]) / v1;
            d = std::max(d, std::abs(traces[ki][0][p] - expect));
        }
        CHECK(d < 1e-13);
    }

    // 3-sample data linear in t picks up the centered d_t term
    BoundaryData lin = bd;
    lin.dt = 0.1;
    lin.minus.assign(3, bd.minus[0]);
    lin.plus.assign(3, bd.plus[0]);
    for (std::size_t j = 0; j < 3; ++j)
        for (auto& f : lin.minus[j])
            for (Cplx& z : f.values) z *= 1.0 + 0.5 * static_cast<double>(j);
    auto tr = boundary_x1_derivative(lin, model, 1, 1);
    // d_t g = (g2 - g0) / (2 dt) = (0.5 / 0.1) g_base = 5 g_base; the trace at
    // j = 1 differs from the stationary one (scaled by 1.5) by -5 g / v1
    const auto& base = bd.minus[0][0];
    double d = 0.0;
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        double v1 = g.nodes()[p][0];
        if (v1 <= 0.0) continue;
        // reconstruct: trace(1.5 g) with Gamma of the scaled field, minus dt term
        VelocityField gs(g.num_nodes());
        (void)gs;
        Cplx dt_term = -5.0 * base[p] / v1;
        // compare against an independent evaluation
        auto lf = model.apply_linearized(lin.minus[1][0]);
        auto gf = model.apply_gamma(lin.minus[1][0], lin.minus[1][0]);
        Cplx expect = dt_term - (lf[p] - gf[p]) / v1;
        d = std::max(d, std::abs(tr[0][0][p] - expect));
        break;  // one node suffices; the full loop re-applies L per node
    }
    CHECK(d < 1e-12);
}

TEST_CASE("energy functionals: zero data, exact linearity in amplitude") {
    VelocityGrid g(8, 2.0);
    LandauModel model(g, 0.0);
    WeightSpec w;  // q = 0: flat weight

    std::vector<ChannelState> zero(3, ChannelState(g, 8, 1));
    auto [ez, dz] = energy_functionals(zero, 0.1, model, w);
    CHECK(ez == 0.0);
    CHECK(dz == 0.0);

    auto st1 = channel_init("random", 0.5, 8, 1, g, 7);
    auto st2 = st1;
    for (std::size_t ki = 0; ki < st2.num_stored(); ++ki)
        for (auto& f : st2.slab(ki))
            for (Cplx& z : f.values) z *= 2.0;

    std::vector<ChannelState> t1(3, st1), t2(3, st2);
    auto [e1, d1] = energy_functionals(t1, 0.1, model, w);
    auto [e2, d2] = energy_functionals(t2, 0.1, model, w);
    CHECK(e1 > 0.0);
    CHECK(d1 > 0.0);
    CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-12));
    CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-12));

    // exponential weight only increases the sup norms
    WeightSpec wq;
    wq.q = 0.5;
    wq.gamma = -3.0;  // soft range admits q > 0
    auto [eq, dq] = energy_functionals(t1, 0.1, model, wq);
    CHECK(eq > e1);
    CHECK(dq > 0.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "kwnr/fd.hpp"
#include "kwnr/landau.hpp"
#include "test_util.hpp"

using namespace kwnr;

static double deriv_err(int n, bool factored) {
    VelocityGrid g(n, 8.0);
    VelocityField f(g.num_nodes()), exact(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        const Vec3& v = g.nodes()[p];
        double e = std::exp(-0.25 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
        f[p] = v[1] * e;
        exact[p] = (1.0 - 0.5 * v[1] * v[1]) * e;
    }
    auto d = factored ? maxwellian_derivative(g, f, 1) : derivative(g, f, 1);
    double err = 0.0;
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        err = std::max(err, std::abs(d[p] - exact[p]));
    return err;
}

TEST_CASE("finite-difference derivative accuracy") {
    // plain stencils: 4th-order interior convergence
    double e16 = deriv_err(16, false), e32 = deriv_err(32, false);
    CHECK(e16 < 0.2);
    CHECK(e32 < e16 / 8.0);
    // Maxwellian-factored form is exact on Hermite-type fields
    CHECK(deriv_err(16, true) < 1e-9);
}

TEST_CASE("psi kernel") {
    auto p1 = psi_kernel({1.0, 0.0, 0.0}, 0.0);
    CHECK(p1[0][0] == doctest::Approx(0.0));
    CHECK(p1[1][1] == doctest::Approx(1.0));
    CHECK(p1[2][2] == doctest::Approx(1.0));
    CHECK(p1[0][1] == doctest::Approx(0.0));

    auto p2 = psi_kernel({0.0, 0.0, 2.0}, -3.0);
    CHECK(p2[0][0] == doctest::Approx(0.5));
    CHECK(p2[1][1] == doctest::Approx(0.5));
    CHECK(p2[2][2] == doctest::Approx(0.0));

    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    for (int t = 0; t < 10; ++t) {
        Vec3 z{gauss(rng), gauss(rng), gauss(rng)};
        auto ps = psi_kernel(z, -1.3);
        for (int j = 0; j < 3; ++j) {
            double r = 0.0;
            for (int m = 0; m < 3; ++m) {
                r += ps[j][m] * z[m];
                CHECK(ps[j][m] == doctest::Approx(ps[m][j]));
            }
            CHECK(std::abs(r) < 1e-12);
        }
    }
    // zero-offset convention
    auto p0 = psi_kernel({0.0, 0.0, 0.0}, 0.0);
    CHECK(p0[0][0] == 0.0);
    CHECK(p0[1][1] == 0.0);
}

TEST_CASE("sigma coefficients: Maxwell-molecule closed form") {
    // gamma = 0 oracle: sigma_{jm}(v) = delta_{jm}(|v|^2 + 2) - v_j v_m.
    VelocityGrid g(16, 8.0);
    LandauModel model(g, 0.0);
    std::size_t checked = 0;
    for (std::size_t p = 0; p < g.num_nodes(); p += 53) {
        const Vec3& v = g.nodes()[p];
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if (r2 > 25.0) continue;  // compare away from the truncation boundary
        for (int j = 0; j < 3; ++j)
            for (int m = j; m < 3; ++m) {
                double exact = (j == m ? r2 + 2.0 : 0.0) - v[j] * v[m];
                double got = model.sigma()[LandauModel::sym_index(j, m)][p];
                CHECK(std::abs(got - exact) < 2e-3 * (1.0 + std::abs(exact)));
            }
        ++checked;
    }
    CHECK(checked > 5);
}

TEST_CASE("sigma positive semidefinite for gamma = -3") {
    VelocityGrid g(12, 8.0);
    LandauModel model(g, -3.0);
    double min_eig = 1e30;
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        Eigen::Matrix3d S;
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m)
                S(j, m) = model.sigma()[LandauModel::sym_index(j, m)][p];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
        min_eig = std::min(min_eig, es.eigenvalues()[0]);
    }
    CHECK(min_eig >= -1e-10);
}

TEST_CASE("L annihilates collision invariants") {
    VelocityGrid g(16, 8.0);
    LandauModel model(g, 0.0);
    auto inv = g.collision_invariants();
    for (int i = 0; i < 5; ++i) {
        auto Lf = model.apply_linearized(inv[i]);
        CHECK(g.norm_l2(Lf) < 1e-3);
    }
}

TEST_CASE("L self-adjoint and nonnegative on decaying fields") {
    VelocityGrid g(12, 8.0);
    LandauModel model(g, -1.0);
    std::mt19937 rng(11);
    for (int t = 0; t < 5; ++t) {
        auto f = testutil::random_decaying_field(g, rng);
        auto h = testutil::random_decaying_field(g, rng);
        auto Lf = model.apply_linearized(f);
        auto Lh = model.apply_linearized(h);
        Cplx a = g.inner_product(Lf, h), b = g.inner_product(f, Lh);
        double scale = g.norm_l2(Lf) + g.norm_l2(Lh);
        // divergence-form asymmetry is at stencil truncation level
        CHECK(std::abs(a - b) < 0.05 * scale);
        CHECK(g.inner_product(Lf, f).real() >= -1e-8);
    }
}

TEST_CASE("Gamma: equilibrium annihilation, orthogonality, bilinearity") {
    VelocityGrid g(16, 8.0);
    LandauModel model(g, 0.0);
    auto smu = g.sqrt_maxwellian();

    auto gmm = model.apply_gamma(smu, smu);
    CHECK(g.norm_l2(gmm) < 1e-2);

    std::mt19937 rng(23);
    auto f = testutil::random_decaying_field(g, rng);
    auto h = testutil::random_decaying_field(g, rng);
    auto gam = model.apply_gamma(f, h);
    auto inv = g.collision_invariants();
    double scale = g.norm_l2(gam);
    // mass orthogonality is the tightest discrete identity; momentum/energy
    // carry the Leibniz truncation error of the expanded divergence form
    CHECK(std::abs(g.inner_product(gam, inv[0])) < 5e-3 * scale);
    for (int i = 1; i < 5; ++i)
        CHECK(std::abs(g.inner_product(gam, inv[i])) < 0.15 * scale);

    VelocityField zero(g.num_nodes());
    CHECK(g.norm_l2(model.apply_gamma(zero, h)) == 0.0);
    CHECK(g.norm_l2(model.apply_gamma(f, zero)) == 0.0);

    // bilinearity
    VelocityField f2(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p) f2[p] = 2.0 * f[p];
    auto gam2 = model.apply_gamma(f2, h);
    double diff = 0.0;
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        diff = std::max(diff, std::abs(gam2[p] - 2.0 * gam[p]));
    CHECK(diff < 1e-10);
}

TEST_CASE("D-norm values") {
    VelocityGrid g(16, 8.0);
    LandauModel model(g, 0.0);
    WeightSpec flat{0.0, 2.0, ModelKind::Landau, 0.0, 0.5};

    VelocityField zero(g.num_nodes());
    CHECK(model.d_norm_sq(zero, flat) == 0.0);

    // f = sqrt(mu), gamma = 0, w = 1: integrand reduces to |v|^2 mu, integral 3.
    auto smu = g.sqrt_maxwellian();
    CHECK(model.d_norm_sq(smu, flat) == doctest::Approx(3.0).epsilon(5e-3));

    std::mt19937 rng(5);
    auto f = testutil::random_decaying_field(g, rng);
    WeightSpec soft{0.5, 2.0, ModelKind::Landau, -3.0, 0.5};
    CHECK(model.d_norm_sq(f, soft) >= model.d_norm_sq(f, flat));
}

TEST_CASE("dense L: exact self-adjointness, null space, PSD, consistency") {
    VelocityGrid g(12, 8.0);
    LandauModel model(g, -1.0);
    const auto& L = model.dense_L();
    const std::size_t N = g.num_nodes();

    Eigen::VectorXd qv(N);
    for (std::size_t p = 0; p < N; ++p) qv[p] = g.quad_weights()[p];

    // exact self-adjointness w.r.t. the quadrature inner product
    Eigen::MatrixXd WL = qv.asDiagonal() * L;
    double asym = (WL - WL.transpose()).cwiseAbs().maxCoeff();
    CHECK(asym < 1e-8 * WL.cwiseAbs().maxCoeff());

    // exact null space: collision invariants
    auto inv = g.collision_invariants();
    for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd z(N);
        for (std::size_t p = 0; p < N; ++p) z[p] = inv[i][p].real();
        CHECK((L * z).norm() < 1e-9);
    }

    std::mt19937 rng(17);
    auto f = testutil::random_decaying_field(g, rng);
    Eigen::VectorXd x(N);
    for (std::size_t p = 0; p < N; ++p) x[p] = f[p].real();

    // nonnegative quadratic form
    CHECK(x.dot(WL * x) >= -1e-10);

    // dense_form is WL itself
    CHECK((model.dense_form() - WL).cwiseAbs().maxCoeff() <
          1e-12 * WL.cwiseAbs().maxCoeff());

    // weak agreement with the divergence-form application: the two
    // discretizations differ pointwise near the truncation boundary (the
    // 1/sqrt(mu) factor amplifies form-level truncation error there), but
    // their pairings against decaying test fields match to stencil order
    for (int t = 0; t < 4; ++t) {
        auto u = testutil::random_decaying_field(g, rng);
        auto h = testutil::random_decaying_field(g, rng);
        Eigen::VectorXd xu(N), xh(N);
        for (std::size_t p = 0; p < N; ++p) {
            xu[p] = u[p].real();
            xh[p] = h[p].real();
        }
        double dense_pair = xh.dot(WL * xu);
        auto Lu = model.apply_linearized(u);
        double apply_pair = g.inner_product(Lu, h).real();
        // normalize by the operator output size, not the (possibly tiny,
        // cancellation-prone) pairing values themselves
        double scale = g.norm_l2(Lu) * g.norm_l2(h);
        CHECK(std::abs(dense_pair - apply_pair) < 0.1 * scale + 1e-12);
    }
}

TEST_CASE("D-form matrix matches d_norm_sq") {
    VelocityGrid g(8, 8.0);
    LandauModel model(g, 0.0);
    WeightSpec flat{0.0, 2.0, ModelKind::Landau, 0.0, 0.5};
    Eigen::MatrixXd D = model.d_form_matrix(flat);

    std::mt19937 rng(29);
    auto f = testutil::random_decaying_field(g, rng);
    Eigen::VectorXd x(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p) x[p] = f[p].real();
    double quad = x.dot(D * x);
    CHECK(quad == doctest::Approx(model.d_norm_sq(f, flat)).epsilon(1e-10));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "kwnr/checkpoint.hpp"
#include "kwnr/config.hpp"

using namespace kwnr;

TEST_CASE("config: defaults and overrides") {
    auto cfg = parse_config_text("model.kind = landau\n");
    CHECK(cfg.gamma == 0.0);
    CHECK(cfg.domain == "torus");
    CHECK(cfg.n_per_dim == 8);
    CHECK(cfg.scheme == "explicit_rk2");
    CHECK(cfg.nonlinear);
    CHECK(cfg.weight_spec().q == 0.0);

    auto c2 = parse_config_text(
        "model.kind = landau\n"
        "model.gamma = -3.0     # soft range\n"
        "weight.q = 0.5\n"
        "weight.theta = 2\n"
        "grid.n_per_dim = 16\n"
        "grid.v_max = 8\n"
        "time.dt = 0.25\n"
        "time.t_final = 100\n"
        "time.scheme = imex_strang\n"
        "time.nonlinear = false\n"
        "run.seed = 7\n");
    CHECK(c2.gamma == -3.0);
    CHECK(c2.q == 0.5);
    CHECK(c2.n_per_dim == 16);
    CHECK(c2.seed == 7);
    auto w = c2.weight_spec();
    CHECK(w.q == 0.5);
    CHECK(w.theta == 2.0);
    CHECK(w.gamma == -3.0);
}

TEST_CASE("config: rejections") {
    CHECK_THROWS(parse_config_text(""));  // missing model.kind
    CHECK_THROWS(parse_config_text("model.kind = vlasov\n"));
    CHECK_THROWS(parse_config_text("model.kind = landau\nmodel.kind = landau\n"));
    CHECK_THROWS(parse_config_text("model.kind = landau\nno.such.key = 1\n"));
    CHECK_THROWS(parse_config_text("model.kind = landau\ngrid.n_per_dim = 9\n"));
    CHECK_THROWS(parse_config_text("model.kind = landau\ntime.dt = -1\n"));
    CHECK_THROWS(parse_config_text("model.kind = landau\nbroken line\n"));
    CHECK_THROWS(parse_config_text("model.kind = landau\ngrid.v_max = six\n"));
    // soft-range run without exponential weight
    CHECK_THROWS(parse_config_text("model.kind = landau\nmodel.gamma = -3\n"));
    // boltzmann is explicit only
    CHECK_THROWS(parse_config_text(
        "model.kind = boltzmann\ntime.scheme = imex_euler\n"));
    // channel runs use the Landau backend
    CHECK_THROWS(parse_config_text(
        "model.kind = boltzmann\ndomain.kind = channel\n"));
    CHECK_THROWS(parse_config_text(
        "model.kind = landau\ndomain.kind = channel\ndomain.bc = periodic\n"));
    // boltzmann s range
    CHECK_THROWS(parse_config_text("model.kind = boltzmann\nmodel.s = 1.0\n"));

    auto ok = parse_config_text(
        "model.kind = landau\ndomain.kind = channel\ndomain.bc = inflow\n");
    CHECK(ok.bc == "inflow");
}

TEST_CASE("checkpoint: torus round trip is bit exact") {
    VelocityGrid g(8, 6.0);
    auto f = init_field("random_micro", 1e-2, 2, g, 42);
    const std::string path = "ckpt_torus_test.bin";
    save_checkpoint(path, f, 1.25, 125);
    CHECK(!checkpoint_is_channel(path));

    double t = 0.0;
    std::uint64_t step = 0;
    auto f2 = load_checkpoint_torus(path, g, t, step);
    CHECK(t == 1.25);
    CHECK(step == 125);
    REQUIRE(f2.num_stored() == f.num_stored());
    for (std::size_t m = 0; m < f.num_stored(); ++m)
        for (std::size_t p = 0; p < g.num_nodes(); ++p) {
            CHECK(f2.mode(m)[p].real() == f.mode(m)[p].real());
            CHECK(f2.mode(m)[p].imag() == f.mode(m)[p].imag());
        }

    // grid mismatch and wrong-kind loads are rejected
    VelocityGrid g12(12, 6.0);
    double tt;
    std::uint64_t ss;
    CHECK_THROWS(load_checkpoint_torus(path, g12, tt, ss));
    CHECK_THROWS(load_checkpoint_channel(path, g, tt, ss));
    CHECK_THROWS(load_checkpoint_torus("no_such_file.bin", g, tt, ss));
    std::remove(path.c_str());
}

TEST_CASE("checkpoint: channel round trip is bit exact") {
    VelocityGrid g(8, 2.0);
    auto st = channel_init("random", 1e-2, 8, 1, g, 3);
    const std::string path = "ckpt_channel_test.bin";
    save_checkpoint(path, st, 0.5, 10);
    CHECK(checkpoint_is_channel(path));

    double t = 0.0;
    std::uint64_t step = 0;
    auto st2 = load_checkpoint_channel(path, g, t, step);
    CHECK(t == 0.5);
    CHECK(step == 10);
    REQUIRE(st2.num_stored() == st.num_stored());
    REQUIRE(st2.n_x1() == st.n_x1());
    double dmax = 0.0;
    for (std::size_t m = 0; m < st.num_stored(); ++m)
        for (int i = 0; i < st.n_x1(); ++i)
            for (std::size_t p = 0; p < g.num_nodes(); ++p)
                dmax = std::max(dmax, std::abs(st2.slab(m)[static_cast<std::size_t>(i)][p] -
                                               st.slab(m)[static_cast<std::size_t>(i)][p]));
    CHECK(dmax == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("checkpoint: corrupt magic rejected") {
    const std::string path = "ckpt_bad_test.bin";
    {
        std::FILE* fp = std::fopen(path.c_str(), "wb");
        REQUIRE(fp);
        std::fputs("NOPE", fp);
        std::fclose(fp);
    }
    VelocityGrid g(8, 6.0);
    double t;
    std::uint64_t step;
    CHECK_THROWS(load_checkpoint_torus(path, g, t, step));
    CHECK_THROWS(checkpoint_is_channel(path));
    std::remove(path.c_str());
}

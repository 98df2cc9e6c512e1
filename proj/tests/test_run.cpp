#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kwnr/run.hpp"

using namespace kwnr;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string l;
    while (std::getline(in, l)) lines.push_back(l);
    return lines;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig small_torus() {
    RunConfig cfg;
    cfg.model_kind = "landau";
    cfg.gamma = 0.0;
    cfg.k_max = 1;
    cfg.n_per_dim = 8;
    cfg.v_max = 6.0;
    cfg.dt = 0.01;
    cfg.t_final = 0.1;
    cfg.preset = "random_micro";
    cfg.amplitude = 1e-2;
    cfg.seed = 5;
    cfg.out_dir = "run_test_out";
    return cfg;
}

}  // namespace

TEST_CASE("torus scenario: files, summary, series") {
    auto cfg = small_torus();
    auto sum = run_scenario(cfg);
    CHECK(sum.steps == 10);
    CHECK(sum.t_final == doctest::Approx(0.1));
    CHECK(sum.initial_norm > 0.0);
    CHECK(sum.final_norm > 0.0);
    CHECK(sum.final_norm <= sum.initial_norm * 1.01);
    CHECK(sum.x_t >= sum.final_norm * 0.99);
    CHECK(sum.dissipation > 0.0);
    CHECK(sum.high_order_max >= sum.high_order_final);
    CHECK(sum.min_f_final > -1e-12);  // positive up to corner roundoff
    CHECK(sum.mass_drift < 1e-10);
    CHECK(sum.energy_drift < 1e-10);
    CHECK(sum.norm_series.size() == 11);

    auto lines = read_lines(sum.csv_path);
    REQUIRE(lines.size() == 12);  // header + 11 records
    CHECK(lines[0].rfind("t,norm_L1k_L2v,weighted_norm,dnorm_cumulative",
                         0) == 0);
    CHECK(lines[0].find("sym_defect") == std::string::npos);

    auto j = nlohmann::json::parse(read_bytes(sum.summary_path));
    CHECK(j["model_kind"] == "landau");
    CHECK(j["steps"] == 10);
    CHECK(j["x_t"].get<double>() == doctest::Approx(sum.x_t));
    CHECK(fs::exists(sum.checkpoint_path));
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("torus scenario: resume reproduces the uninterrupted run bitwise") {
    auto cfg = small_torus();
    cfg.out_dir = "run_test_full";
    auto full = run_scenario(cfg);

    auto half = cfg;
    half.out_dir = "run_test_half";
    half.t_final = 0.05;
    auto h = run_scenario(half);
    CHECK(h.steps == 5);

    auto rest = cfg;
    rest.out_dir = "run_test_rest";
    auto r = run_scenario(rest, h.checkpoint_path);
    CHECK(r.steps == 5);
    CHECK(r.t_start == doctest::Approx(0.05));
    CHECK(r.t_final == doctest::Approx(0.1));

    CHECK(read_bytes(full.checkpoint_path) == read_bytes(r.checkpoint_path));
    fs::remove_all(cfg.out_dir);
    fs::remove_all(half.out_dir);
    fs::remove_all(rest.out_dir);
}

TEST_CASE("channel scenario: symmetry and energy functionals") {
    RunConfig cfg;
    cfg.model_kind = "landau";
    cfg.gamma = 0.0;
    cfg.domain = "channel";
    cfg.bc = "specular";
    cfg.n_x1 = 8;
    cfg.kbar_max = 1;
    cfg.n_per_dim = 8;
    cfg.v_max = 6.0;
    cfg.ball_radius = 6.0;
    cfg.dt = 0.005;
    cfg.t_final = 0.025;
    cfg.preset = "symmetric_micro";
    cfg.amplitude = 1e-2;
    cfg.seed = 2;
    cfg.out_dir = "run_test_channel";
    auto sum = run_scenario(cfg);
    CHECK(sum.steps == 5);
    CHECK(sum.sym_defect_final < 1e-10);
    CHECK(sum.e_t > 0.0);
    CHECK(sum.d_t >= 0.0);
    CHECK(sum.initial_norm > 0.0);

    auto lines = read_lines(sum.csv_path);
    CHECK(lines[0].find("sym_defect") != std::string::npos);
    REQUIRE(lines.size() >= 3);

    auto j = nlohmann::json::parse(read_bytes(sum.summary_path));
    CHECK(j.contains("e_t"));
    CHECK(j["domain"] == "channel");
    fs::remove_all(cfg.out_dir);
}

#pragma once

#include <cstdint>
#include <string>

#include "kwnr/weight.hpp"

namespace kwnr {

/// Full description of one run. Parsed from a flat `key = value` file
/// (see docs/config_schema.md for every key and default); unknown keys are
/// rejected. validate() enforces the model/weight admissibility hypothesis
/// and the module preconditions before anything is allocated.
struct RunConfig {
    // model
    std::string model_kind = "landau";  // landau | boltzmann
    double gamma = 0.0;
    double s = 0.5;           // boltzmann only
    double theta_min = 0.1;   // boltzmann angular truncation

    // domain
    std::string domain = "torus";  // torus | channel
    int k_max = 2;
    int n_x1 = 32;            // channel only
    int kbar_max = 2;         // channel only
    std::string bc = "specular";  // specular | inflow
    std::string boundary_preset = "zero";
    double boundary_amplitude = 0.0;

    // velocity grid
    int n_per_dim = 8;
    double v_max = 6.0;
    double ball_radius = 0.0;  // 0 = no support restriction

    // weight w_{q,theta}
    double q = 0.0;
    double theta = 2.0;

    // time stepping
    double dt = 0.01;
    double t_final = 1.0;
    std::string scheme = "explicit_rk2";  // explicit_rk2 | imex_euler | imex_strang
    bool nonlinear = true;
    bool conserve_correction = true;

    // initial data
    std::string preset = "random_micro";
    double amplitude = 1e-2;

    // output / bookkeeping
    std::string out_dir = ".";
    int record_every = 1;      // CSV cadence in steps
    int checkpoint_every = 0;  // 0 = only at the end
    std::uint64_t seed = 0;
    int workers = 1;
    int high_order_m = 2;

    // decay-fit window; negatives select [0.2 T, T]
    double fit_t_lo = -1.0;
    double fit_t_hi = -1.0;

    WeightSpec weight_spec() const;

    /// Throws std::invalid_argument on any violated precondition.
    void validate() const;
};

/// Parse a config file; every key must be known. Throws on I/O or parse
/// errors; the result is validated.
RunConfig load_config(const std::string& path);

/// Parse from an in-memory string (same grammar; used by tests).
RunConfig parse_config_text(const std::string& text);

}  // namespace kwnr

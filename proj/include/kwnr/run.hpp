#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kwnr/config.hpp"
#include "kwnr/decay.hpp"
#include "kwnr/spectral_field.hpp"

namespace kwnr {

/// Everything a finished run reports. The same data is written to
/// out_dir/summary.json; the time series (CSV schema in docs/config_schema.md)
/// streams to out_dir/run.csv while the run progresses.
struct RunSummary {
    RunConfig cfg;
    std::uint64_t steps = 0;      // steps executed in this process
    double t_start = 0.0;         // nonzero when resumed
    double t_final = 0.0;
    double wall_seconds = 0.0;

    double initial_norm = 0.0;    // l1k norms at t_start / t_final
    double final_norm = 0.0;
    double x_t = 0.0;             // sup-in-time / dissipation accumulators
    double x_t_weighted = 0.0;
    double dissipation = 0.0;
    double high_order_final = 0.0, high_order_max = 0.0;  // torus only

    double mass_drift = 0.0;      // |final - initial| of the invariants
    double momentum_drift = 0.0;
    double energy_drift = 0.0;

    double min_f_final = 0.0;     // positivity monitor at the last record
    double sym_defect_final = 0.0;  // channel only
    double e_t = 0.0, d_t = 0.0;    // channel energy / dissipation functionals

    /// (t, l1k norm) at the record cadence; input of the decay fit.
    std::vector<std::pair<double, double>> norm_series;
    bool has_fit = false;
    DecayFit fit;

    std::string csv_path, summary_path, checkpoint_path;

    std::string to_json() const;
};

/// Execute one configured run (torus or channel) end to end: initialize or
/// resume from a checkpoint, step to t_final, stream the CSV, write
/// checkpoints at the configured cadence plus one at the end, fit the decay
/// envelope when enough samples exist, and write summary.json.
RunSummary run_scenario(const RunConfig& cfg,
                        const std::string& resume_path = "");

}  // namespace kwnr

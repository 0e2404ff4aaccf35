#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "omsub/conditioning.hpp"
#include "omsub/config.hpp"
#include "omsub/csv.hpp"
#include "omsub/dynamics.hpp"

namespace omsub {

// One output row of a sweep: the conditional-state observables at a single
// grid point. The independent variable (time or temperature) is added by
// the experiment that owns the record.
struct SweepRecord {
  double fidelity = 0.0;       // overlap with the single-phonon target
  double n_eff = 0.0;          // pre-subtraction mechanical occupation
  double log_negativity = 0.0; // pre-subtraction mechanics-field entanglement
  double w_origin = 0.0;       // conditional Wigner value at delta = 0 (a0*a1)
  double brr_over_a1 = 0.0;    // coefficient ratios; both -4 for an ideal
  double bri_over_a1 = 0.0;    //   single-phonon state, cross term 0
  double bii_over_a1 = 0.0;
  std::vector<double> pn;      // P(0..n_max)
  double remainder = 0.0;      // 1 - sum(pn)
};

// Conditional-state observables of a propagated covariance.
SweepRecord conditioning_record(const CovarianceState& v, int n_max);

// Experiments, each returning the full table it would write. Grid points
// are computed independently (optionally in parallel); row order always
// follows grid order.
Table run_time_sweep(const RunConfig& config);
Table run_temp_sweep(const RunConfig& config);
Table run_wigner_grid(const RunConfig& config);
Table run_optimum(const RunConfig& config);
Table run_steady_red(const RunConfig& config);

struct ExperimentResult {
  Table table;
  std::filesystem::path path;  // output_path / output_filename(config)
};

// Dispatches on config.kind and resolves the output location (no file is
// written; the CLI owns that step).
ExperimentResult run_experiment(const RunConfig& config);

// Process exit code for a failed run: 2 for validation errors (including
// zero-probability conditioning requests), 3 for instability, 4 for
// numerical self-check failures, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace omsub

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omsub/model.hpp"

namespace omsub {

enum class ExperimentKind { time_sweep, temp_sweep, wigner_grid, optimum, steady_red };

const char* kind_name(ExperimentKind k);

// Inverse of kind_name. Throws ParameterError for unrecognized names.
ExperimentKind parse_kind(const std::string& name);

// Grid specifications shared by the experiments; only the fields an
// experiment uses are read from it.
struct GridSpec {
  double time_start = 0.5e-6;        // s, time_sweep / optimum
  double time_stop = 50e-6;          // s
  double time_step = 0.5e-6;         // s
  double subtraction_time = 9e-6;    // s, temp_sweep / wigner_grid
  std::vector<double> temperatures = {5e-3, 10e-3, 15e-3, 20e-3, 25e-3, 50e-3};  // K
  double wigner_half_width = 2.0;    // phase-space output window
  double wigner_step = 0.05;
  int n_max = 10;                    // phonon-distribution truncation
};

// A fully resolved run: physical parameters (with the kappa convention
// already applied), experiment kind, grids, and output destination.
struct RunConfig {
  ExperimentKind kind = ExperimentKind::time_sweep;
  PhysicalParams params;
  std::string kappa_convention = "amplitude";  // "amplitude" | "energy"
  GridSpec grids;
  std::string output_path = ".";  // directory for the CSV file
  int threads = 1;
};

// Defaults: the reference parameter point (L = 1 mm, lambda = 1064 nm,
// omega_m/2pi = 1 GHz, P = 5 mW, m = 5 ng, kappa/2pi = 90 MHz, T = 1 mK,
// gamma_m/2pi = 100 Hz, Delta = -omega_m), experiment time_sweep.
RunConfig default_config();

// Parses and validates a config file (sections [params], [experiment],
// [grids], [output]; key = value lines; # or ; comments). Missing keys fall
// back to defaults. Parse errors carry line and key context; validation
// errors list every violated invariant. Both throw ParameterError.
RunConfig load_config(const std::string& path);

// Same grammar from an in-memory string; source_name appears in messages.
RunConfig parse_config_text(const std::string& text, const std::string& source_name);

// Canonical resolved-config block: deterministic "key = value" lines of all
// physics, experiment, grid, and convention fields (output path and thread
// count excluded, they do not affect the data).
std::string canonical_text(const RunConfig& config);

// FNV-1a 64-bit hash of canonical_text; names the output file.
std::uint64_t config_hash(const RunConfig& config);

// "<kind>_<16-hex-digit-hash>.csv"
std::string output_filename(const RunConfig& config);

}  // namespace omsub

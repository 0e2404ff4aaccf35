#include "omsub/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "omsub/constants.hpp"
#include "omsub/errors.hpp"
#include "parallel.hpp"

namespace omsub {

namespace {

std::vector<double> time_grid(const GridSpec& grids) {
  std::vector<double> ts;
  // Half-step slack keeps the inclusive endpoint robust to rounding.
  for (double t = grids.time_start; t <= grids.time_stop + 0.5 * grids.time_step;
       t += grids.time_step) {
    ts.push_back(t);
  }
  return ts;
}

// Shared header block: resolved configuration, derived quantities, and the
// stability report. Deliberately free of timestamps and hostnames so that
// identical configs render byte-identical files.
std::vector<std::string> metadata_lines(const RunConfig& config,
                                        const DerivedParams& derived,
                                        const StabilityReport& stability) {
  std::vector<std::string> lines;
  std::istringstream canonical(canonical_text(config));
  std::string line;
  while (std::getline(canonical, line)) lines.push_back(line);
  lines.push_back("g0_rad_s = " + format_double(derived.g0));
  lines.push_back("drive_amp_per_s = " + format_double(derived.drive_amp));
  lines.push_back("cavity_amp = " + format_double(derived.cavity_amp));
  lines.push_back("g_eff_rad_s = " + format_double(derived.g_eff));
  lines.push_back("thermal_occ = " + format_double(derived.thermal_occ));
  lines.push_back("coupling_ratio = " + format_double(derived.coupling_ratio));
  lines.push_back("sideband_ratio = " + format_double(derived.sideband_ratio));
  lines.push_back("spectral_abscissa_rad_s = " +
                  format_double(stability.spectral_abscissa));
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  lines.push_back(std::string("config_hash = ") + hash);
  return lines;
}

std::vector<std::string> observable_columns(int n_max) {
  std::vector<std::string> cols = {"fidelity",     "n_eff",
                                   "log_negativity", "w_origin",
                                   "brr_over_a1",  "bri_over_a1",
                                   "bii_over_a1"};
  for (int n = 0; n <= n_max; ++n) cols.push_back("p" + std::to_string(n));
  cols.push_back("p_remainder");
  return cols;
}

void append_observables(std::vector<double>& row, const SweepRecord& record) {
  row.push_back(record.fidelity);
  row.push_back(record.n_eff);
  row.push_back(record.log_negativity);
  row.push_back(record.w_origin);
  row.push_back(record.brr_over_a1);
  row.push_back(record.bri_over_a1);
  row.push_back(record.bii_over_a1);
  row.insert(row.end(), record.pn.begin(), record.pn.end());
  row.push_back(record.remainder);
}

StabilityReport require_stable(const DriftMatrix& k) {
  const StabilityReport report = is_stable(k);
  if (!report.stable) {
    throw InstabilityError(
        "parameters are dynamically unstable (spectral abscissa " +
        format_double(report.spectral_abscissa) + " rad/s)");
  }
  return report;
}

}  // namespace

SweepRecord conditioning_record(const CovarianceState& v, int n_max) {
  const WignerCoefficients w = wigner_coefficients(block_decompose(v));
  SweepRecord record;
  const PhononDistribution dist = phonon_distribution(w, std::max(n_max, 1));
  record.pn.assign(dist.probs.begin(),
                   dist.probs.begin() + std::min<std::size_t>(dist.probs.size(),
                                                              static_cast<std::size_t>(n_max) + 1));
  record.remainder = 1.0;
  for (double p : record.pn) record.remainder -= p;
  record.fidelity = dist.probs[1];  // overlap with |1> is P(1) by definition
  record.n_eff = effective_phonon_number(v);
  record.log_negativity = logarithmic_negativity(v);
  record.w_origin = w.a0 * w.a1;
  record.brr_over_a1 = w.brr / w.a1;
  record.bri_over_a1 = w.bri / w.a1;
  record.bii_over_a1 = w.bii / w.a1;
  return record;
}

Table run_time_sweep(const RunConfig& config) {
  const DerivedParams derived = derive_params(config.params);
  const DriftMatrix k = drift_matrix(derived, config.params);
  const DiffusionMatrix d = diffusion_matrix(config.params, derived.thermal_occ);
  const StabilityReport stability = require_stable(k);
  const CovarianceState v0 = initial_covariance(derived.thermal_occ);
  const std::vector<double> ts = time_grid(config.grids);

  Table table;
  table.metadata = metadata_lines(config, derived, stability);
  table.columns = {"t_s", "omega_m_t"};
  const std::vector<std::string> obs = observable_columns(config.grids.n_max);
  table.columns.insert(table.columns.end(), obs.begin(), obs.end());
  table.rows.resize(ts.size());

  detail::parallel_for(static_cast<int>(ts.size()), config.threads, [&](int i) {
    const double t = ts[static_cast<std::size_t>(i)];
    const CovarianceState v = propagate(v0, k, d, t);
    const SweepRecord record = conditioning_record(v, config.grids.n_max);
    std::vector<double>& row = table.rows[static_cast<std::size_t>(i)];
    row.push_back(t);
    row.push_back(config.params.mech_freq * t);
    append_observables(row, record);
  });
  return table;
}

Table run_temp_sweep(const RunConfig& config) {
  const DerivedParams derived = derive_params(config.params);
  const DriftMatrix k = drift_matrix(derived, config.params);
  const StabilityReport stability = require_stable(k);
  const std::vector<double>& temps = config.grids.temperatures;

  Table table;
  table.metadata = metadata_lines(config, derived, stability);
  table.columns = {"temperature_k", "nbar"};
  const std::vector<std::string> obs = observable_columns(config.grids.n_max);
  table.columns.insert(table.columns.end(), obs.begin(), obs.end());
  table.rows.resize(temps.size());

  detail::parallel_for(static_cast<int>(temps.size()), config.threads, [&](int i) {
    const double temperature = temps[static_cast<std::size_t>(i)];
    const double nbar = thermal_occupation(config.params.mech_freq, temperature);
    const DiffusionMatrix d = diffusion_matrix(config.params, nbar);
    const CovarianceState v = propagate(initial_covariance(nbar), k, d,
                                        config.grids.subtraction_time);
    const SweepRecord record = conditioning_record(v, config.grids.n_max);
    std::vector<double>& row = table.rows[static_cast<std::size_t>(i)];
    row.push_back(temperature);
    row.push_back(nbar);
    append_observables(row, record);
  });
  return table;
}

Table run_wigner_grid(const RunConfig& config) {
  const DerivedParams derived = derive_params(config.params);
  const DriftMatrix k = drift_matrix(derived, config.params);
  const DiffusionMatrix d = diffusion_matrix(config.params, derived.thermal_occ);
  const StabilityReport stability = require_stable(k);
  const CovarianceState v = propagate(initial_covariance(derived.thermal_occ), k,
                                      d, config.grids.subtraction_time);
  const WignerCoefficients w = wigner_coefficients(block_decompose(v));

  const double norm = wigner_norm_quadrature(w);
  if (std::abs(norm - 1.0) > 1e-6) {
    throw QuadratureDisagreementError(
        "Wigner normalization self-check failed: integral over the documented "
        "grid is " +
        format_double(norm) + ", expected 1 within 1e-06");
  }

  const double hw = config.grids.wigner_half_width;
  const double step = config.grids.wigner_step;
  const int npts = static_cast<int>(std::floor(2.0 * hw / step + 0.5)) + 1;

  Table table;
  table.metadata = metadata_lines(config, derived, stability);
  table.metadata.push_back("wigner_norm = " + format_double(norm));
  table.columns = {"delta_r", "delta_i", "wigner"};
  table.rows.reserve(static_cast<std::size_t>(npts) * npts);
  for (int ir = 0; ir < npts; ++ir) {
    const double dr = -hw + ir * step;
    for (int ii = 0; ii < npts; ++ii) {
      const double di = -hw + ii * step;
      table.rows.push_back({dr, di, wigner_eval(w, dr, di)});
    }
  }
  return table;
}

Table run_optimum(const RunConfig& config) {
  const DerivedParams derived = derive_params(config.params);
  const DriftMatrix k = drift_matrix(derived, config.params);
  const StabilityReport stability = require_stable(k);
  const std::vector<double> ts = time_grid(config.grids);
  const std::vector<double> values =
      fidelity_scan(config.params, ts, config.threads);

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }

  Table table;
  table.metadata = metadata_lines(config, derived, stability);
  table.metadata.push_back("t_opt_s = " + format_double(ts[best]));
  table.metadata.push_back("f_opt = " + format_double(values[best]));
  table.columns = {"t_s", "fidelity"};
  table.rows.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    table.rows.push_back({ts[i], values[i]});
  }
  return table;
}

Table run_steady_red(const RunConfig& config) {
  const DerivedParams derived = derive_params(config.params);
  const DriftMatrix k = drift_matrix(derived, config.params);
  const DiffusionMatrix d = diffusion_matrix(config.params, derived.thermal_occ);
  const StabilityReport stability = require_stable(k);
  const CovarianceState v = steady_state(k, d);
  const SweepRecord record = conditioning_record(v, config.grids.n_max);

  Table table;
  table.metadata = metadata_lines(config, derived, stability);
  table.columns = {"nbar"};
  const std::vector<std::string> obs = observable_columns(config.grids.n_max);
  table.columns.insert(table.columns.end(), obs.begin(), obs.end());
  std::vector<double> row = {derived.thermal_occ};
  append_observables(row, record);
  table.rows.push_back(std::move(row));
  return table;
}

ExperimentResult run_experiment(const RunConfig& config) {
  ExperimentResult result;
  switch (config.kind) {
    case ExperimentKind::time_sweep: result.table = run_time_sweep(config); break;
    case ExperimentKind::temp_sweep: result.table = run_temp_sweep(config); break;
    case ExperimentKind::wigner_grid: result.table = run_wigner_grid(config); break;
    case ExperimentKind::optimum: result.table = run_optimum(config); break;
    case ExperimentKind::steady_red: result.table = run_steady_red(config); break;
  }
  result.path = std::filesystem::path(config.output_path) / output_filename(config);
  return result;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const QuadratureDisagreementError*>(&e)) return 4;
  if (dynamic_cast<const DegenerateMechanicalBlockError*>(&e)) return 4;
  if (dynamic_cast<const InstabilityError*>(&e)) return 3;
  if (dynamic_cast<const VacuumFieldError*>(&e)) return 2;
  if (dynamic_cast<const ParameterError*>(&e)) return 2;
  return 1;
}

}  // namespace omsub

// Command line front end: load a config, run the requested experiment, and
// write one CSV. Identical configs produce byte-identical files.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "omsub/config.hpp"
#include "omsub/constants.hpp"
#include "omsub/csv.hpp"
#include "omsub/errors.hpp"
#include "omsub/experiments.hpp"

namespace {

void check_constants_pin() {
  const char* pin = std::getenv("PHONON_CONSTANTS");
  if (pin != nullptr && std::string(pin) != omsub::constants::constants_version) {
    throw omsub::ParameterError(
        std::string("PHONON_CONSTANTS requests '") + pin +
        "' but this build provides '" + omsub::constants::constants_version +
        "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditioned optomechanical state simulator"};

  std::string config_path;
  std::string out_override;
  std::string experiment_override;
  int threads_override = 0;

  // Existence is checked by load_config so that a missing file maps to the
  // documented validation exit code rather than a CLI11 usage error.
  app.add_option("config", config_path, "Path to the run configuration file")
      ->required();
  const CLI::Option* out_opt =
      app.add_option("--out", out_override, "Override the output directory");
  const CLI::Option* experiment_opt =
      app.add_option("--experiment", experiment_override,
                     "Override the experiment kind (time_sweep, temp_sweep, "
                     "wigner_grid, optimum, steady_red)");
  const CLI::Option* threads_opt =
      app.add_option("--threads", threads_override,
                     "Override the worker thread count (>= 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    check_constants_pin();

    omsub::RunConfig config = omsub::load_config(config_path);
    if (out_opt->count() > 0) config.output_path = out_override;
    if (experiment_opt->count() > 0) {
      config.kind = omsub::parse_kind(experiment_override);
    }
    if (threads_opt->count() > 0) {
      if (threads_override < 1) {
        throw omsub::ParameterError("--threads must be >= 1");
      }
      config.threads = threads_override;
    }

    const omsub::ExperimentResult result = omsub::run_experiment(config);
    omsub::write_csv_file(result.table, result.path);
    std::cout << result.path.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return omsub::exit_code_for(e);
  }
}

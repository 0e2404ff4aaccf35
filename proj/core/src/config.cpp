#include "omsub/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "omsub/constants.hpp"
#include "omsub/csv.hpp"
#include "omsub/errors.hpp"

namespace omsub {

namespace {

constexpr double two_pi = 2.0 * constants::pi;

struct RawEntry {
  std::string value;
  int line = 0;
};

using RawConfig = std::map<std::string, RawEntry>;

// Allowed "section.key" names; anything else is rejected with line context.
constexpr std::array known_keys = {
    "params.cavity_length_m",
    "params.wavelength_m",
    "params.mech_freq_over_2pi_hz",
    "params.mech_damping_over_2pi_hz",
    "params.cavity_decay_over_2pi_hz",
    "params.input_power_w",
    "params.effective_mass_kg",
    "params.temperature_k",
    "params.detuning_over_omega_m",
    "params.kappa_convention",
    "experiment.kind",
    "experiment.threads",
    "grids.time_start_us",
    "grids.time_stop_us",
    "grids.time_step_us",
    "grids.subtraction_time_us",
    "grids.temperatures_k",
    "grids.wigner_half_width",
    "grids.wigner_step",
    "grids.n_max",
    "output.path",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& msg) {
  throw ParameterError(source + ":" + std::to_string(line) + ": " + msg);
}

RawConfig parse_raw(const std::string& text, const std::string& source) {
  RawConfig raw;
  std::string section;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    // Strip comments; values never legitimately contain '#' or ';'.
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    const std::string_view body = trim(line);
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']') fail_at(source, lineno, "unterminated section header");
      section = std::string(trim(body.substr(1, body.size() - 2)));
      if (section != "params" && section != "experiment" && section != "grids" &&
          section != "output") {
        fail_at(source, lineno, "unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      fail_at(source, lineno, "expected 'key = value', got '" + std::string(body) + "'");
    }
    if (section.empty()) {
      fail_at(source, lineno, "key outside of any [section]");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) fail_at(source, lineno, "empty key");
    if (value.empty()) fail_at(source, lineno, "empty value for key '" + key + "'");

    const std::string full = section + "." + key;
    bool known = false;
    for (const char* k : known_keys) known = known || (full == k);
    if (!known) fail_at(source, lineno, "unknown key '" + key + "' in [" + section + "]");
    if (raw.count(full)) fail_at(source, lineno, "duplicate key '" + key + "'");
    raw[full] = {value, lineno};
  }
  return raw;
}

double parse_double(const RawEntry& entry, const std::string& source,
                    const std::string& key) {
  const std::string& text = entry.value;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail_at(source, entry.line, "key '" + key + "': expected a number, got '" + text + "'");
  }
  return value;
}

int parse_int(const RawEntry& entry, const std::string& source, const std::string& key) {
  const std::string& text = entry.value;
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail_at(source, entry.line, "key '" + key + "': expected an integer, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_double_list(const RawEntry& entry, const std::string& source,
                                      const std::string& key) {
  std::vector<double> values;
  std::string_view rest = entry.value;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (item.empty()) {
      fail_at(source, entry.line, "key '" + key + "': empty list element");
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      fail_at(source, entry.line,
              "key '" + key + "': expected a number, got '" + std::string(item) + "'");
    }
    values.push_back(value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return values;
}

}  // namespace

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::time_sweep: return "time_sweep";
    case ExperimentKind::temp_sweep: return "temp_sweep";
    case ExperimentKind::wigner_grid: return "wigner_grid";
    case ExperimentKind::optimum: return "optimum";
    case ExperimentKind::steady_red: return "steady_red";
  }
  throw ParameterError("kind_name: invalid experiment kind");
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "time_sweep") return ExperimentKind::time_sweep;
  if (name == "temp_sweep") return ExperimentKind::temp_sweep;
  if (name == "wigner_grid") return ExperimentKind::wigner_grid;
  if (name == "optimum") return ExperimentKind::optimum;
  if (name == "steady_red") return ExperimentKind::steady_red;
  throw ParameterError("unknown experiment kind '" + name +
                       "' (expected time_sweep, temp_sweep, wigner_grid, "
                       "optimum, or steady_red)");
}

RunConfig default_config() {
  RunConfig config;
  config.params.cavity_length = 1e-3;
  config.params.wavelength = 1.064e-6;
  config.params.mech_freq = two_pi * 1e9;
  config.params.mech_damping = two_pi * 100.0;
  config.params.cavity_decay = two_pi * 90e6;
  config.params.input_power = 5e-3;
  config.params.effective_mass = 5e-12;
  config.params.temperature = 1e-3;
  config.params.detuning = -config.params.mech_freq;
  return config;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  const RawConfig raw = parse_raw(text, source);
  RunConfig config = default_config();

  // Raw user-facing values; converted to internal SI after reading.
  double mech_freq_over_2pi = 1e9;
  double mech_damping_over_2pi = 100.0;
  double cavity_decay_over_2pi = 90e6;
  double detuning_over_omega_m = -1.0;

  auto entry = [&raw](const char* key) -> const RawEntry* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };

  if (const RawEntry* e = entry("params.cavity_length_m"))
    config.params.cavity_length = parse_double(*e, source, "cavity_length_m");
  if (const RawEntry* e = entry("params.wavelength_m"))
    config.params.wavelength = parse_double(*e, source, "wavelength_m");
  if (const RawEntry* e = entry("params.mech_freq_over_2pi_hz"))
    mech_freq_over_2pi = parse_double(*e, source, "mech_freq_over_2pi_hz");
  if (const RawEntry* e = entry("params.mech_damping_over_2pi_hz"))
    mech_damping_over_2pi = parse_double(*e, source, "mech_damping_over_2pi_hz");
  if (const RawEntry* e = entry("params.cavity_decay_over_2pi_hz"))
    cavity_decay_over_2pi = parse_double(*e, source, "cavity_decay_over_2pi_hz");
  if (const RawEntry* e = entry("params.input_power_w"))
    config.params.input_power = parse_double(*e, source, "input_power_w");
  if (const RawEntry* e = entry("params.effective_mass_kg"))
    config.params.effective_mass = parse_double(*e, source, "effective_mass_kg");
  if (const RawEntry* e = entry("params.temperature_k"))
    config.params.temperature = parse_double(*e, source, "temperature_k");
  if (const RawEntry* e = entry("params.detuning_over_omega_m"))
    detuning_over_omega_m = parse_double(*e, source, "detuning_over_omega_m");
  if (const RawEntry* e = entry("params.kappa_convention")) {
    config.kappa_convention = e->value;
    if (config.kappa_convention != "amplitude" && config.kappa_convention != "energy") {
      fail_at(source, e->line,
              "kappa_convention must be 'amplitude' or 'energy', got '" + e->value + "'");
    }
  }

  if (const RawEntry* e = entry("experiment.kind")) {
    const std::string& kind = e->value;
    try {
      config.kind = parse_kind(kind);
    } catch (const ParameterError&) {
      fail_at(source, e->line,
              "unknown experiment kind '" + kind +
                  "' (expected time_sweep, temp_sweep, wigner_grid, optimum, or "
                  "steady_red)");
    }
  }
  if (const RawEntry* e = entry("experiment.threads"))
    config.threads = parse_int(*e, source, "threads");

  // Microseconds resolve by division: 1e6 is exactly representable, so decimal
  // inputs land on the same double as the equivalent seconds literal and an
  // explicit default (say 50) hashes identically to an omitted key.
  if (const RawEntry* e = entry("grids.time_start_us"))
    config.grids.time_start = parse_double(*e, source, "time_start_us") / 1e6;
  if (const RawEntry* e = entry("grids.time_stop_us"))
    config.grids.time_stop = parse_double(*e, source, "time_stop_us") / 1e6;
  if (const RawEntry* e = entry("grids.time_step_us"))
    config.grids.time_step = parse_double(*e, source, "time_step_us") / 1e6;
  if (const RawEntry* e = entry("grids.subtraction_time_us"))
    config.grids.subtraction_time =
        parse_double(*e, source, "subtraction_time_us") / 1e6;
  if (const RawEntry* e = entry("grids.temperatures_k"))
    config.grids.temperatures = parse_double_list(*e, source, "temperatures_k");
  if (const RawEntry* e = entry("grids.wigner_half_width"))
    config.grids.wigner_half_width = parse_double(*e, source, "wigner_half_width");
  if (const RawEntry* e = entry("grids.wigner_step"))
    config.grids.wigner_step = parse_double(*e, source, "wigner_step");
  if (const RawEntry* e = entry("grids.n_max"))
    config.grids.n_max = parse_int(*e, source, "n_max");

  if (const RawEntry* e = entry("output.path")) config.output_path = e->value;

  // Resolve internal SI values. The config's kappa is reinterpreted under
  // the energy-decay convention as twice the amplitude rate.
  config.params.mech_freq = two_pi * mech_freq_over_2pi;
  config.params.mech_damping = two_pi * mech_damping_over_2pi;
  config.params.cavity_decay = two_pi * cavity_decay_over_2pi;
  if (config.kappa_convention == "energy") config.params.cavity_decay /= 2.0;
  config.params.detuning = detuning_over_omega_m * config.params.mech_freq;

  // Validation pass: collect everything wrong, then report it all at once.
  std::vector<std::string> bad;
  try {
    validate_params(config.params);
  } catch (const ParameterError& e) {
    bad.emplace_back(e.what());
  }
  if (!(config.grids.time_step > 0.0)) bad.emplace_back("time_step_us must be > 0");
  if (!(config.grids.time_start >= 0.0)) bad.emplace_back("time_start_us must be >= 0");
  if (config.grids.time_stop < config.grids.time_start)
    bad.emplace_back("time_stop_us must be >= time_start_us");
  if (!(config.grids.subtraction_time >= 0.0))
    bad.emplace_back("subtraction_time_us must be >= 0");
  if (config.grids.temperatures.empty())
    bad.emplace_back("temperatures_k must be nonempty");
  for (double t : config.grids.temperatures) {
    if (!(t >= 0.0)) {
      bad.emplace_back("temperatures_k entries must be >= 0");
      break;
    }
  }
  for (std::size_t i = 1; i < config.grids.temperatures.size(); ++i) {
    if (config.grids.temperatures[i] <= config.grids.temperatures[i - 1]) {
      bad.emplace_back("temperatures_k must be strictly increasing");
      break;
    }
  }
  if (!(config.grids.wigner_half_width > 0.0))
    bad.emplace_back("wigner_half_width must be > 0");
  if (!(config.grids.wigner_step > 0.0)) bad.emplace_back("wigner_step must be > 0");
  if (config.grids.n_max < 0) bad.emplace_back("n_max must be >= 0");
  if (config.threads < 1) bad.emplace_back("threads must be >= 1");

  if (!bad.empty()) {
    std::string msg = source + ": validation failed: ";
    for (std::size_t i = 0; i < bad.size(); ++i) {
      if (i) msg += "; ";
      msg += bad[i];
    }
    throw ParameterError(msg);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw ParameterError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::string canonical_text(const RunConfig& config) {
  std::string out;
  auto put = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  auto putd = [&put](const char* key, double value) { put(key, format_double(value)); };

  put("experiment", kind_name(config.kind));
  put("constants", constants::constants_version);
  put("kappa_convention", config.kappa_convention);
  putd("cavity_length_m", config.params.cavity_length);
  putd("wavelength_m", config.params.wavelength);
  putd("mech_freq_rad_s", config.params.mech_freq);
  putd("mech_damping_rad_s", config.params.mech_damping);
  putd("cavity_decay_rad_s", config.params.cavity_decay);
  putd("input_power_w", config.params.input_power);
  putd("effective_mass_kg", config.params.effective_mass);
  putd("temperature_k", config.params.temperature);
  putd("detuning_rad_s", config.params.detuning);
  putd("time_start_s", config.grids.time_start);
  putd("time_stop_s", config.grids.time_stop);
  putd("time_step_s", config.grids.time_step);
  putd("subtraction_time_s", config.grids.subtraction_time);
  std::string temps;
  for (std::size_t i = 0; i < config.grids.temperatures.size(); ++i) {
    if (i) temps += ' ';
    temps += format_double(config.grids.temperatures[i]);
  }
  put("temperatures_k", temps);
  putd("wigner_half_width", config.grids.wigner_half_width);
  putd("wigner_step", config.grids.wigner_step);
  put("n_max", std::to_string(config.grids.n_max));
  return out;
}

std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a64(canonical_text(config));
}

std::string output_filename(const RunConfig& config) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%016llx.csv", kind_name(config.kind),
                static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

}  // namespace omsub

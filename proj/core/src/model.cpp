#include "omsub/model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "omsub/constants.hpp"
#include "omsub/errors.hpp"

namespace omsub {

double thermal_occupation(double mech_freq, double temperature) {
  if (!(mech_freq > 0.0)) {
    throw ParameterError("thermal_occupation: mech_freq must be > 0 (got " +
                         std::to_string(mech_freq) + ")");
  }
  if (temperature < 0.0) {
    throw ParameterError("thermal_occupation: temperature must be >= 0 (got " +
                         std::to_string(temperature) + ")");
  }
  if (temperature == 0.0) return 0.0;
  const double x = constants::hbar * mech_freq / (constants::k_boltzmann * temperature);
  // expm1 keeps precision for small x; for large x it overflows to +inf and
  // the occupation cleanly underflows to 0.
  return 1.0 / std::expm1(x);
}

void validate_params(const PhysicalParams& p) {
  std::vector<std::string> bad;
  auto require = [&bad](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
  };
  require(p.cavity_length > 0.0, "cavity_length must be > 0");
  require(p.wavelength > 0.0, "wavelength must be > 0");
  require(p.mech_freq > 0.0, "mech_freq must be > 0");
  require(p.mech_damping > 0.0, "mech_damping must be > 0");
  require(p.cavity_decay > 0.0, "cavity_decay must be > 0");
  require(p.input_power >= 0.0, "input_power must be >= 0");
  require(p.effective_mass > 0.0, "effective_mass must be > 0");
  require(p.temperature >= 0.0, "temperature must be >= 0");
  require(std::isfinite(p.detuning), "detuning must be finite");
  if (!bad.empty()) {
    std::string msg = "invalid parameters: ";
    for (std::size_t i = 0; i < bad.size(); ++i) {
      if (i) msg += "; ";
      msg += bad[i];
    }
    throw ParameterError(msg);
  }
}

DerivedParams derive_params(const PhysicalParams& p) {
  validate_params(p);
  const double omega_c = 2.0 * constants::pi * constants::c_light / p.wavelength;
  DerivedParams d;
  d.g0 = omega_c / p.cavity_length *
         std::sqrt(constants::hbar / (p.effective_mass * p.mech_freq));
  d.drive_amp =
      std::sqrt(2.0 * p.input_power * p.cavity_decay / (constants::hbar * omega_c));
  d.cavity_amp = d.drive_amp / std::hypot(p.cavity_decay, p.detuning);
  d.g_eff = std::sqrt(2.0) * d.g0 * d.cavity_amp;
  d.thermal_occ = thermal_occupation(p.mech_freq, p.temperature);
  d.coupling_ratio = d.g_eff / p.cavity_decay;
  d.sideband_ratio = p.cavity_decay / p.mech_freq;
  d.sideband_resolved = p.cavity_decay < p.mech_freq;
  return d;
}

}  // namespace omsub

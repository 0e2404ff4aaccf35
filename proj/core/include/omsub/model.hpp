#pragma once

namespace omsub {

// User-facing experiment parameters, SI units throughout. Angular
// frequencies are in rad/s. The detuning is signed: negative values put the
// drive above the cavity resonance, the side that resonantly creates
// phonon-photon pairs.
struct PhysicalParams {
  double cavity_length = 0.0;   // m
  double wavelength = 0.0;      // m; sets the cavity frequency 2*pi*c/lambda
  double mech_freq = 0.0;       // rad/s
  double mech_damping = 0.0;    // rad/s
  double cavity_decay = 0.0;    // rad/s, amplitude-decay convention
  double input_power = 0.0;     // W
  double effective_mass = 0.0;  // kg
  double temperature = 0.0;     // K
  double detuning = 0.0;        // rad/s
};

// Quantities derived from PhysicalParams that drive the linearized dynamics,
// plus the two regime reports attached for diagnostics.
struct DerivedParams {
  double g0 = 0.0;           // single-photon coupling (omega_c/L)*sqrt(hbar/(m*omega_m)), rad/s
  double drive_amp = 0.0;    // drive amplitude sqrt(2*P*kappa/(hbar*omega_c)), 1/s
  double cavity_amp = 0.0;   // steady intracavity amplitude |E|/sqrt(kappa^2+Delta^2), real >= 0
  double g_eff = 0.0;        // linearized coupling sqrt(2)*g0*cavity_amp, rad/s
  double thermal_occ = 0.0;  // mechanical bath occupation nbar at temperature T
  double coupling_ratio = 0.0;   // g_eff / kappa, weak-coupling report
  double sideband_ratio = 0.0;   // kappa / omega_m, sideband-resolution report
  bool sideband_resolved = false;  // kappa < omega_m (reported, not enforced)
};

// Bose-Einstein occupation 1/(exp(hbar*omega/kB*T) - 1). Returns exactly 0
// at T = 0 (the zero-temperature limit, not an error).
double thermal_occupation(double mech_freq, double temperature);

// Throws ParameterError listing every violated field invariant.
void validate_params(const PhysicalParams& p);

// Pure function: populates all DerivedParams fields from p. Rejects invalid
// parameters via validate_params.
DerivedParams derive_params(const PhysicalParams& p);

}  // namespace omsub

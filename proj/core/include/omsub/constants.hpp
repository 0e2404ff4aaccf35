#pragma once

namespace omsub::constants {

// CODATA-2018 values, pinned so regression numbers are stable across
// toolchains and standard-library revisions.
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double c_light = 2.99792458e8;      // m / s

inline constexpr double pi = 3.14159265358979323846;

// Constant-set identifier reported in output metadata. The environment
// variable PHONON_CONSTANTS, when set, must match this string.
inline constexpr const char* constants_version = "codata2018";

}  // namespace omsub::constants

#include <benchmark/benchmark.h>

#include "omsub/conditioning.hpp"
#include "omsub/dynamics.hpp"
#include "omsub/model.hpp"

namespace {

omsub::PhysicalParams reference_params() {
  omsub::PhysicalParams p;
  p.cavity_length = 1e-3;
  p.wavelength = 1.064e-6;
  p.mech_freq = 2.0 * 3.14159265358979323846 * 1e9;
  p.mech_damping = 2.0 * 3.14159265358979323846 * 100.0;
  p.cavity_decay = 2.0 * 3.14159265358979323846 * 90e6;
  p.input_power = 5e-3;
  p.effective_mass = 5e-12;
  p.temperature = 1e-3;
  p.detuning = -p.mech_freq;
  return p;
}

struct Fixture {
  omsub::PhysicalParams p = reference_params();
  omsub::DerivedParams d = omsub::derive_params(p);
  omsub::DriftMatrix k = omsub::drift_matrix(d, p);
  omsub::DiffusionMatrix dm = omsub::diffusion_matrix(p, d.thermal_occ);
  omsub::CovarianceState v0 = omsub::initial_covariance(d.thermal_occ);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void bm_propagate_short(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(omsub::propagate(f.v0, f.k, f.dm, 0.5e-6));
  }
}
BENCHMARK(bm_propagate_short);

void bm_propagate_long(benchmark::State& state) {
  // kappa*t of order 1e7: exercises the dyadic squaring path.
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(omsub::propagate(f.v0, f.k, f.dm, 20e-3));
  }
}
BENCHMARK(bm_propagate_long);

void bm_steady_state(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(omsub::steady_state(f.k, f.dm));
  }
}
BENCHMARK(bm_steady_state);

void bm_wigner_coefficients(benchmark::State& state) {
  const Fixture& f = fixture();
  const omsub::CovarianceState v = omsub::propagate(f.v0, f.k, f.dm, 9e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        omsub::wigner_coefficients(omsub::block_decompose(v)));
  }
}
BENCHMARK(bm_wigner_coefficients);

void bm_fidelity_dual_route(benchmark::State& state) {
  // Dominated by the 800x800 midpoint self-check quadrature.
  const Fixture& f = fixture();
  const omsub::WignerCoefficients w = omsub::wigner_coefficients(
      omsub::block_decompose(omsub::propagate(f.v0, f.k, f.dm, 9e-6)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(omsub::fidelity(w, 1));
  }
}
BENCHMARK(bm_fidelity_dual_route);

void bm_phonon_distribution(benchmark::State& state) {
  const Fixture& f = fixture();
  const omsub::WignerCoefficients w = omsub::wigner_coefficients(
      omsub::block_decompose(omsub::propagate(f.v0, f.k, f.dm, 9e-6)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(omsub::phonon_distribution(w, 10));
  }
}
BENCHMARK(bm_phonon_distribution);

void bm_logarithmic_negativity(benchmark::State& state) {
  const Fixture& f = fixture();
  const omsub::CovarianceState v = omsub::propagate(f.v0, f.k, f.dm, 0.2e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(omsub::logarithmic_negativity(v));
  }
}
BENCHMARK(bm_logarithmic_negativity);

}  // namespace

BENCHMARK_MAIN();

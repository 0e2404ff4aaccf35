#pragma once

#include <vector>

#include "omsub/dynamics.hpp"

namespace omsub {

// Fixed quadrature grid used by every overlap and normalization self-check:
// midpoint rule on [-half_width, half_width]^2 with the given step. Chosen
// so the vacuum-Wigner normalization error is below 1e-10.
inline constexpr double overlap_grid_half_width = 8.0;
inline constexpr double overlap_grid_step = 0.02;

// Covariance blocks in the doubled normalization (vacuum variance 1) used by
// the conditional-state formulas; the reassembled matrix equals 2*v exactly.
// m12 and m21 are retained separately because the coefficient formulas use
// both entries.
struct BlockDecomposition {
  Matrix2 m = Matrix2::Zero();  // mechanical block
  Matrix2 f = Matrix2::Zero();  // field block
  Matrix2 c = Matrix2::Zero();  // mechanics-field cross block
};

// Conditional mechanical Wigner function after subtracting one photon:
//   W(dr, di) = a0 * (a1 + brr*dr^2 + bri*dr*di + bii*di^2)
//               * exp(-delta^T c_quad delta),  delta = (dr, di).
struct WignerCoefficients {
  double a0 = 0.0;   // normalization prefactor
  double a1 = 0.0;   // constant polynomial term
  double brr = 0.0;  // dr^2 coefficient
  double bri = 0.0;  // dr*di coefficient
  double bii = 0.0;  // di^2 coefficient
  Matrix2 c_quad = Matrix2::Zero();  // positive-definite exponent matrix
};

// Conditional phonon-number probabilities P(0..n_max) plus the truncation
// tail, reported rather than silently renormalized.
struct PhononDistribution {
  std::vector<double> probs;
  double remainder = 0.0;  // 1 - sum(probs)
};

// Both evaluations of one overlap integral, before clamping.
struct OverlapRoutes {
  double closed_form = 0.0;  // exact Gaussian-moment evaluation
  double quadrature = 0.0;   // midpoint rule on the documented grid
};

struct OptimalTime {
  double t_opt = 0.0;  // s
  double f_opt = 0.0;
};

// Doubles v into the block normalization of the conditional-state formulas.
BlockDecomposition block_decompose(const CovarianceState& v);

// Evaluates the conditional-Wigner coefficient formulas verbatim. Throws
// VacuumFieldError when f11+f22-2 <= 1e-12 (zero subtraction probability)
// and DegenerateMechanicalBlockError when 4*m11*m22 - (m12+m21)^2 <= 0.
WignerCoefficients wigner_coefficients(const BlockDecomposition& b);

double wigner_eval(const WignerCoefficients& w, double dr, double di);

// Wigner function of the Fock state |n>: (2/pi)(-1)^n L_n(4|d|^2) e^{-2|d|^2}.
double target_fock_wigner(int n, double dr, double di);

// Overlap pi * integral(W * W_n) by both routes. Throws
// QuadratureDisagreementError when the routes differ by more than 1e-6 or
// the Wigner normalization check fails; returns raw, unclamped values.
OverlapRoutes fidelity_routes(const WignerCoefficients& w, int n = 1);

// Fidelity of the conditional state with Fock |n>, clamped to [0, 1];
// values outside [-1e-9, 1+1e-9] raise ParameterError.
double fidelity(const WignerCoefficients& w, int n = 1);

// P(n) for n <= n_max via the Fock-Wigner overlaps, dual-checked per entry.
PhononDistribution phonon_distribution(const WignerCoefficients& w, int n_max);

// Exact photon-subtracted two-mode-squeezed-vacuum marginal:
//   P(n, s) = n * tanh(s)^{2n} / (cosh(s) * sinh(s))^2, with P(0) = 0.
// Rejects s <= 0 (subtraction from vacuum).
double tmsv_subtracted_distribution(double s, int n);

// Mean mechanical excitation (v11 + v22 - 1)/2 from the raw vacuum-1/2
// mechanical block; tiny negatives (> -1e-9) clamp to 0.
double effective_phonon_number(const CovarianceState& v);

// Two-mode Gaussian logarithmic negativity max(0, -ln(2*nu)) with nu the
// smaller symplectic eigenvalue of the partially transposed covariance.
double logarithmic_negativity(const CovarianceState& v);

// Conditional-state fidelities with |1> over the time grid; index i holds
// the value for subtraction at t_grid[i]. Throws InstabilityError for
// unstable parameters.
std::vector<double> fidelity_scan(const PhysicalParams& p,
                                  const std::vector<double>& t_grid,
                                  int threads = 1);

// Grid point maximizing the fidelity with |1>; ties break toward the
// earliest time (earlier subtraction means less decoherence).
OptimalTime find_optimal_subtraction_time(const PhysicalParams& p,
                                          const std::vector<double>& t_grid);

// Integral of W over the documented grid; 1 within 1e-6 for states the grid
// can represent.
double wigner_norm_quadrature(const WignerCoefficients& w);

// Two-mode squeezed vacuum covariance at squeezing s, the short-time limit
// of the blue-detuned dynamics and the analytic oracle state.
CovarianceState tmsv_covariance(double s);

}  // namespace omsub

#pragma once

#include <Eigen/Dense>
#include <utility>

#include "omsub/model.hpp"

namespace omsub {

using Matrix2 = Eigen::Matrix2d;
using Matrix4 = Eigen::Matrix4d;

// Generator of the linear fluctuation dynamics over (dq, dp, dX, dY):
//   k = [[0, wm, 0, 0], [-wm, -gm, G, 0], [0, 0, -kp, D], [G, 0, -D, -kp]].
// The zero entries of this canonical form are exactly zero.
struct DriftMatrix {
  Matrix4 k = Matrix4::Zero();  // rad/s
};

// Diagonal noise input diag(0, gamma_m*(2*nbar+1), kappa, kappa).
struct DiffusionMatrix {
  Matrix4 d = Matrix4::Zero();  // rad/s
};

// Symmetric covariance of the quadrature fluctuations (dq, dp, dX, dY) in
// the vacuum-variance-1/2 convention; together with the zero mean it fully
// specifies the Gaussian state.
struct CovarianceState {
  Matrix4 v = Matrix4::Zero();  // dimensionless
  double time = 0.0;            // s; infinity for stationary states
};

struct StabilityReport {
  bool stable = false;
  // Largest real part over the drift eigenvalues, rad/s; stable iff < 0.
  double spectral_abscissa = 0.0;
};

// Canonical drift matrix from raw rates. Useful for reduced or synthetic
// systems in tests; drift_matrix() below is the physical-parameter wrapper.
DriftMatrix drift_matrix_from_rates(double mech_freq, double mech_damping,
                                    double cavity_decay, double detuning,
                                    double g_eff);

DriftMatrix drift_matrix(const DerivedParams& d, const PhysicalParams& p);

DiffusionMatrix diffusion_matrix_from_rates(double mech_damping,
                                            double cavity_decay, double nbar);

DiffusionMatrix diffusion_matrix(const PhysicalParams& p, double nbar);

// Eigenvalue criterion: stable iff every eigenvalue of k has negative real
// part. Equivalent to the polynomial stability conditions but robust for a
// fixed 4x4 matrix.
StabilityReport is_stable(const DriftMatrix& k);

// Mechanical thermal state at occupation nbar, field vacuum, no cross
// correlations: v(0) = diag(nbar+1/2, nbar+1/2, 1/2, 1/2) at time 0.
CovarianceState initial_covariance(double nbar);

// Exact closed-form solution of dv/dt = k v + v k^T + d:
//   v(t) = M v0 M^T + Q(t),  M = e^{kt},  Q(t) = int_0^t e^{ks} d e^{k^T s} ds,
// with M and Q read off a block matrix exponential. The block form is
// exponentiated on a dyadic substep (nondimensionalized norm <= 1) and
// composed by squaring, which keeps every intermediate bounded even when
// kappa*t is in the thousands. Output is re-symmetrized. Rejects t < 0.
CovarianceState propagate(const CovarianceState& v0, const DriftMatrix& k,
                          const DiffusionMatrix& d, double t);

// Stationary covariance: solves k v + v k^T + d = 0 with residual at most
// 1e-10 * ||d||. Throws InstabilityError when is_stable(k) fails.
CovarianceState steady_state(const DriftMatrix& k, const DiffusionMatrix& d);

// Symplectic eigenvalues (nu_minus, nu_plus) of a two-mode covariance in the
// vacuum-1/2 convention; physical states have nu_minus >= 1/2.
std::pair<double, double> symplectic_eigenvalues(const Matrix4& v);

}  // namespace omsub

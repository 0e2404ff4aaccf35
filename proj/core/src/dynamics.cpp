#include "omsub/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "omsub/errors.hpp"

namespace omsub {

namespace {

using Matrix8 = Eigen::Matrix<double, 8, 8>;

Matrix4 symmetrized(const Matrix4& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

DriftMatrix drift_matrix_from_rates(double mech_freq, double mech_damping,
                                    double cavity_decay, double detuning,
                                    double g_eff) {
  DriftMatrix k;
  k.k << 0.0, mech_freq, 0.0, 0.0,
      -mech_freq, -mech_damping, g_eff, 0.0,
      0.0, 0.0, -cavity_decay, detuning,
      g_eff, 0.0, -detuning, -cavity_decay;
  return k;
}

DriftMatrix drift_matrix(const DerivedParams& d, const PhysicalParams& p) {
  return drift_matrix_from_rates(p.mech_freq, p.mech_damping, p.cavity_decay,
                                 p.detuning, d.g_eff);
}

DiffusionMatrix diffusion_matrix_from_rates(double mech_damping,
                                            double cavity_decay, double nbar) {
  if (nbar < 0.0) {
    throw ParameterError("diffusion_matrix: nbar must be >= 0 (got " +
                         std::to_string(nbar) + ")");
  }
  DiffusionMatrix d;
  d.d.diagonal() << 0.0, mech_damping * (2.0 * nbar + 1.0), cavity_decay,
      cavity_decay;
  return d;
}

DiffusionMatrix diffusion_matrix(const PhysicalParams& p, double nbar) {
  return diffusion_matrix_from_rates(p.mech_damping, p.cavity_decay, nbar);
}

StabilityReport is_stable(const DriftMatrix& k) {
  Eigen::EigenSolver<Matrix4> solver(k.k, /*computeEigenvectors=*/false);
  StabilityReport report;
  report.spectral_abscissa = solver.eigenvalues().real().maxCoeff();
  report.stable = report.spectral_abscissa < 0.0;
  return report;
}

CovarianceState initial_covariance(double nbar) {
  if (nbar < 0.0) {
    throw ParameterError("initial_covariance: nbar must be >= 0 (got " +
                         std::to_string(nbar) + ")");
  }
  CovarianceState state;
  state.v.diagonal() << nbar + 0.5, nbar + 0.5, 0.5, 0.5;
  state.time = 0.0;
  return state;
}

CovarianceState propagate(const CovarianceState& v0, const DriftMatrix& k,
                          const DiffusionMatrix& d, double t) {
  if (t < 0.0) {
    throw ParameterError("propagate: t must be >= 0 (got " + std::to_string(t) + ")");
  }
  if (t == 0.0) return v0;

  const double scale = k.k.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    // Driftless limit: the covariance grows linearly with the noise input.
    return {symmetrized(v0.v + d.d * t), v0.time + t};
  }

  // Nondimensionalize so the exponentiated block has entries of order one,
  // then split the interval dyadically: tau = t*scale = 2^j * dt, dt <= 1.
  const Matrix4 kn = k.k / scale;
  const Matrix4 dn = d.d / scale;
  const double tau = t * scale;
  int j = 0;
  if (tau > 1.0) j = static_cast<int>(std::ceil(std::log2(tau)));
  const double dt = std::ldexp(tau, -j);

  // Van Loan block exponential on the substep: exp([[k, d], [0, -k^T]]*dt)
  // has M = e^{k dt} in the top-left and F = int_0^dt e^{k(dt-s)} d e^{-k^T s} ds
  // in the top-right, which gives Q(dt) = F * M^T.
  Matrix8 block = Matrix8::Zero();
  block.topLeftCorner<4, 4>() = kn * dt;
  block.topRightCorner<4, 4>() = dn * dt;
  block.bottomRightCorner<4, 4>() = -kn.transpose() * dt;
  const Matrix8 eblock = block.exp();
  Matrix4 m = eblock.topLeftCorner<4, 4>();
  Matrix4 q = symmetrized(eblock.topRightCorner<4, 4>() * m.transpose());

  // Compose the affine covariance map over doubled intervals:
  // (M, Q) -> (M^2, M Q M^T + Q). Exact for the linear ODE.
  for (int step = 0; step < j; ++step) {
    q = symmetrized(m * q * m.transpose() + q);
    m = m * m;
  }

  return {symmetrized(m * v0.v * m.transpose() + q), v0.time + t};
}

CovarianceState steady_state(const DriftMatrix& k, const DiffusionMatrix& d) {
  const StabilityReport report = is_stable(k);
  if (!report.stable) {
    throw InstabilityError(
        "steady_state: drift matrix is not stable (spectral abscissa " +
        std::to_string(report.spectral_abscissa) + " rad/s)");
  }

  // Scale invariance of k v + v k^T + d = 0 under (k, d) -> (k, d)/s keeps
  // the 16x16 system well conditioned for rates spanning many decades.
  const double scale = k.k.cwiseAbs().maxCoeff();
  const Matrix4 kn = k.k / scale;
  const Matrix4 dn = d.d / scale;

  // Column-major vectorization: vec(k v + v k^T) = (I (x) k + k (x) I) vec(v).
  Eigen::Matrix<double, 16, 16> a = Eigen::Matrix<double, 16, 16>::Zero();
  for (int i = 0; i < 4; ++i)
    for (int jcol = 0; jcol < 4; ++jcol)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          double entry = 0.0;
          if (jcol == s) entry += kn(i, r);       // I (x) k
          if (i == r) entry += kn(jcol, s);       // k (x) I
          if (entry != 0.0) a(i + 4 * jcol, r + 4 * s) += entry;
        }

  Eigen::Matrix<double, 16, 1> rhs;
  for (int col = 0; col < 4; ++col)
    for (int row = 0; row < 4; ++row) rhs(row + 4 * col) = -dn(row, col);

  const Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 16, 16>> qr(a);
  Eigen::Matrix<double, 16, 1> x = qr.solve(rhs);

  // One refinement pass with an extended-precision residual: the slow modes of
  // a weakly damped drift make the system condition number ~ |k| / gamma_eff,
  // so a plain solve only reaches cond * eps. The corrected solve lands near
  // cond * eps_extended instead, which the vacuum-variance checks rely on.
  Eigen::Matrix<long double, 16, 1> residual_ext;
  for (int row = 0; row < 16; ++row) {
    long double acc = rhs(row);
    for (int col = 0; col < 16; ++col)
      acc -= static_cast<long double>(a(row, col)) *
             static_cast<long double>(x(col));
    residual_ext(row) = acc;
  }
  x += qr.solve(residual_ext.cast<double>().eval());

  Matrix4 v;
  for (int col = 0; col < 4; ++col)
    for (int row = 0; row < 4; ++row) v(row, col) = x(row + 4 * col);
  v = symmetrized(v);

  const double residual = (kn * v + v * kn.transpose() + dn).cwiseAbs().maxCoeff();
  const double bound = 1e-10 * dn.cwiseAbs().maxCoeff();
  if (residual > bound) {
    throw Error("steady_state: Lyapunov residual " + std::to_string(residual) +
                " exceeds bound " + std::to_string(bound));
  }
  return {v, std::numeric_limits<double>::infinity()};
}

std::pair<double, double> symplectic_eigenvalues(const Matrix4& v) {
  const Matrix2 a = v.topLeftCorner<2, 2>();
  const Matrix2 b = v.bottomRightCorner<2, 2>();
  const Matrix2 c = v.topRightCorner<2, 2>();
  const double delta = a.determinant() + b.determinant() + 2.0 * c.determinant();
  const double disc = std::max(delta * delta - 4.0 * v.determinant(), 0.0);
  const double root = std::sqrt(disc);
  const double lo = std::sqrt(std::max((delta - root) / 2.0, 0.0));
  const double hi = std::sqrt(std::max((delta + root) / 2.0, 0.0));
  return {lo, hi};
}

}  // namespace omsub

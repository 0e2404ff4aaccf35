#include "omsub/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "omsub/constants.hpp"
#include "omsub/errors.hpp"
#include "parallel.hpp"

namespace omsub {

namespace {

constexpr double vacuum_field_tolerance = 1e-12;
constexpr double route_disagreement_limit = 1e-6;
constexpr double norm_check_limit = 1e-6;

std::string fmt(double x) { return std::to_string(x); }

double binomial(int n, int k) {
  double value = 1.0;
  for (int i = 1; i <= k; ++i) value *= static_cast<double>(n - k + i) / i;
  return value;
}

// Laguerre polynomials L_0..L_top at x via the three-term recurrence.
void laguerre_all(int top, double x, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(top) + 1);
  out[0] = 1.0;
  if (top == 0) return;
  out[1] = 1.0 - x;
  for (int k = 1; k < top; ++k)
    out[k + 1] = ((2.0 * k + 1.0 - x) * out[k] - k * out[k - 1]) / (k + 1.0);
}

// Central moments E[x^a y^b] of the zero-mean Gaussian with covariance
// sigma, for all a + b <= max_degree, by the Isserlis recursion.
Eigen::MatrixXd moment_table(const Matrix2& sigma, int max_degree) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(max_degree + 1, max_degree + 1);
  m(0, 0) = 1.0;
  for (int a = 0; a <= max_degree; ++a)
    for (int b = 0; b <= max_degree - a; ++b) {
      if (a + b == 0 || (a + b) % 2 != 0) continue;
      if (a >= 2)
        m(a, b) = (a - 1) * sigma(0, 0) * m(a - 2, b) +
                  (b > 0 ? b * sigma(0, 1) * m(a - 1, b - 1) : 0.0);
      else if (a == 1)
        m(a, b) = b * sigma(0, 1) * m(a - 1, b - 1);
      else
        m(a, b) = (b - 1) * sigma(1, 1) * m(0, b - 2);
    }
  return m;
}

// Exact overlap pi * integral(W * W_n): the integrand is a polynomial times
// the Gaussian exp(-delta^T S delta) with S = c_quad + 2I, so it reduces to
// Gaussian moments with covariance S^-1/2.
double closed_overlap(const WignerCoefficients& w, int n,
                      const Eigen::MatrixXd& moments, double det_s) {
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double lag_k = binomial(n, k) * std::pow(-4.0, k) /
                         std::tgamma(static_cast<double>(k) + 1.0);
    for (int j = 0; j <= k; ++j) {
      const double c = lag_k * binomial(k, j);
      const int a = 2 * j;
      const int b = 2 * (k - j);
      total += c * (w.a1 * moments(a, b) + w.brr * moments(a + 2, b) +
                    w.bri * moments(a + 1, b + 1) + w.bii * moments(a, b + 2));
    }
  }
  const double gauss_prefactor = constants::pi / std::sqrt(det_s);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return constants::pi * w.a0 * (2.0 / constants::pi) * sign * gauss_prefactor *
         total;
}

struct QuadraturePass {
  double norm = 0.0;              // integral of W
  std::vector<double> overlaps;   // pi * integral(W * W_n) for n = 0..n_top
};

// One midpoint-rule sweep over the documented grid evaluates W once per node
// and every requested Fock overlap from the same Laguerre recurrence.
QuadraturePass quadrature_pass(const WignerCoefficients& w, int n_top) {
  const double h = overlap_grid_step;
  const int npts = static_cast<int>(std::lround(2.0 * overlap_grid_half_width / h));
  const double c00 = w.c_quad(0, 0);
  const double c01 = w.c_quad(0, 1);
  const double c11 = w.c_quad(1, 1);

  QuadraturePass pass;
  pass.overlaps.assign(static_cast<std::size_t>(n_top) + 1, 0.0);
  std::vector<double> lag;
  lag.reserve(static_cast<std::size_t>(n_top) + 1);

  for (int ir = 0; ir < npts; ++ir) {
    const double r = -overlap_grid_half_width + (ir + 0.5) * h;
    for (int ii = 0; ii < npts; ++ii) {
      const double im = -overlap_grid_half_width + (ii + 0.5) * h;
      const double quad_form = c00 * r * r + 2.0 * c01 * r * im + c11 * im * im;
      const double wv = w.a0 *
                        (w.a1 + w.brr * r * r + w.bri * r * im + w.bii * im * im) *
                        std::exp(-quad_form);
      pass.norm += wv;
      const double u = r * r + im * im;
      const double envelope = std::exp(-2.0 * u);
      laguerre_all(n_top, 4.0 * u, lag);
      double sign = 1.0;
      for (int n = 0; n <= n_top; ++n) {
        pass.overlaps[static_cast<std::size_t>(n)] +=
            wv * (2.0 / constants::pi) * sign * lag[static_cast<std::size_t>(n)] *
            envelope;
        sign = -sign;
      }
    }
  }

  const double cell = h * h;
  pass.norm *= cell;
  for (double& o : pass.overlaps) o *= constants::pi * cell;
  return pass;
}

void check_norm(double norm) {
  if (std::abs(norm - 1.0) > norm_check_limit) {
    throw QuadratureDisagreementError(
        "Wigner normalization self-check failed: integral over the documented "
        "grid is " +
        fmt(norm) + ", expected 1 within " + fmt(norm_check_limit));
  }
}

void check_routes(double closed, double quad, int n) {
  if (std::abs(closed - quad) > route_disagreement_limit) {
    throw QuadratureDisagreementError(
        "overlap self-check failed for Fock n=" + std::to_string(n) +
        ": closed form " + fmt(closed) + " vs quadrature " + fmt(quad));
  }
}

// Clamping policy: tiny excursions past [0, 1] are rounding, anything
// larger is a coefficient bug.
double clamp_unit(double x, double epsilon, const char* what) {
  if (x < 0.0) {
    if (x > -epsilon) return 0.0;
    throw ParameterError(std::string(what) + " is " + fmt(x) +
                         ", below 0 beyond tolerance");
  }
  if (x > 1.0) {
    if (x < 1.0 + epsilon) return 1.0;
    throw ParameterError(std::string(what) + " is " + fmt(x) +
                         ", above 1 beyond tolerance");
  }
  return x;
}

}  // namespace

BlockDecomposition block_decompose(const CovarianceState& v) {
  BlockDecomposition b;
  b.m = 2.0 * v.v.topLeftCorner<2, 2>();
  b.f = 2.0 * v.v.bottomRightCorner<2, 2>();
  b.c = 2.0 * v.v.topRightCorner<2, 2>();
  return b;
}

WignerCoefficients wigner_coefficients(const BlockDecomposition& b) {
  const double m11 = b.m(0, 0);
  const double m12 = b.m(0, 1);
  const double m21 = b.m(1, 0);
  const double m22 = b.m(1, 1);
  const double f11 = b.f(0, 0);
  const double f22 = b.f(1, 1);
  const double c11 = b.c(0, 0);
  const double c12 = b.c(0, 1);
  const double c21 = b.c(1, 0);
  const double c22 = b.c(1, 1);

  const double f_excess = f11 + f22 - 2.0;
  if (f_excess <= vacuum_field_tolerance) {
    throw VacuumFieldError(
        "photon subtraction from a vacuum field: f11+f22-2 = " + fmt(f_excess) +
        " (zero-probability event)");
  }
  const double msum = m12 + m21;
  const double den = 4.0 * m11 * m22 - msum * msum;
  if (!(m11 > 0.0) || den <= 0.0) {
    throw DegenerateMechanicalBlockError(
        "mechanical block fails positivity: 4*m11*m22-(m12+m21)^2 = " + fmt(den));
  }

  // Shorthands shared by the polynomial coefficients.
  const double crr = c11 * c11 + c12 * c12;
  const double cii = c21 * c21 + c22 * c22;
  const double cri = c11 * c21 + c12 * c22;

  WignerCoefficients w;
  const double big_n = 4.0 / f_excess;
  w.a0 = (big_n / constants::pi) * std::pow(m11, -2.5) * std::sqrt(m11 / den);

  const double p_term = -4.0 * cii * m11 + 4.0 * cri * msum - 4.0 * crr * m22 -
                        f_excess * (msum * msum - 4.0 * m11 * m22);
  w.a1 = m11 * m11 / den * p_term;

  const double den2 = den * den;
  w.brr = 16.0 * m11 * m11 *
          (4.0 * cii * m11 * m11 - 4.0 * cri * msum * m11 + crr * msum * msum) /
          den2;
  w.bri = 32.0 * m11 * m11 *
          (2.0 * msum * (cii * m11 + crr * m22) -
           cri * (msum * msum + 4.0 * m11 * m22)) /
          den2;
  w.bii = 16.0 * m11 * m11 *
          (cii * msum * msum - 4.0 * cri * msum * m22 + 4.0 * crr * m22 * m22) /
          den2;

  w.c_quad << m11, msum / 2.0, msum / 2.0, m22;
  w.c_quad *= 8.0 / den;
  return w;
}

double wigner_eval(const WignerCoefficients& w, double dr, double di) {
  const double quad_form = w.c_quad(0, 0) * dr * dr +
                           2.0 * w.c_quad(0, 1) * dr * di +
                           w.c_quad(1, 1) * di * di;
  return w.a0 * (w.a1 + w.brr * dr * dr + w.bri * dr * di + w.bii * di * di) *
         std::exp(-quad_form);
}

double target_fock_wigner(int n, double dr, double di) {
  if (n < 0) throw ParameterError("target_fock_wigner: n must be >= 0");
  const double u = dr * dr + di * di;
  std::vector<double> lag;
  laguerre_all(n, 4.0 * u, lag);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return (2.0 / constants::pi) * sign * lag[static_cast<std::size_t>(n)] *
         std::exp(-2.0 * u);
}

OverlapRoutes fidelity_routes(const WignerCoefficients& w, int n) {
  if (n < 0) throw ParameterError("fidelity: n must be >= 0");
  const Matrix2 s = w.c_quad + 2.0 * Matrix2::Identity();
  const double det_s = s.determinant();
  if (det_s <= 0.0) {
    throw DegenerateMechanicalBlockError(
        "overlap exponent matrix is not positive definite (det = " + fmt(det_s) +
        ")");
  }
  const Matrix2 sigma = 0.5 * s.inverse();
  const Eigen::MatrixXd moments = moment_table(sigma, 2 * n + 2);

  OverlapRoutes routes;
  routes.closed_form = closed_overlap(w, n, moments, det_s);
  const QuadraturePass pass = quadrature_pass(w, n);
  routes.quadrature = pass.overlaps[static_cast<std::size_t>(n)];
  check_norm(pass.norm);
  check_routes(routes.closed_form, routes.quadrature, n);
  return routes;
}

double fidelity(const WignerCoefficients& w, int n) {
  const OverlapRoutes routes = fidelity_routes(w, n);
  return clamp_unit(routes.closed_form, 1e-9, "fidelity");
}

PhononDistribution phonon_distribution(const WignerCoefficients& w, int n_max) {
  if (n_max < 0) throw ParameterError("phonon_distribution: n_max must be >= 0");

  const Matrix2 s = w.c_quad + 2.0 * Matrix2::Identity();
  const double det_s = s.determinant();
  if (det_s <= 0.0) {
    throw DegenerateMechanicalBlockError(
        "overlap exponent matrix is not positive definite (det = " + fmt(det_s) +
        ")");
  }
  const Matrix2 sigma = 0.5 * s.inverse();
  const Eigen::MatrixXd moments = moment_table(sigma, 2 * n_max + 2);
  const QuadraturePass pass = quadrature_pass(w, n_max);
  check_norm(pass.norm);

  PhononDistribution dist;
  dist.probs.resize(static_cast<std::size_t>(n_max) + 1);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double closed = closed_overlap(w, n, moments, det_s);
    check_routes(closed, pass.overlaps[static_cast<std::size_t>(n)], n);
    const double p = clamp_unit(closed, 1e-8, "phonon probability");
    dist.probs[static_cast<std::size_t>(n)] = p;
    total += p;
  }
  dist.remainder = 1.0 - total;
  if (dist.remainder < -norm_check_limit) {
    throw QuadratureDisagreementError(
        "phonon distribution exceeds unity: sum P(0.." + std::to_string(n_max) +
        ") = " + fmt(total));
  }
  return dist;
}

double tmsv_subtracted_distribution(double s, int n) {
  if (!(s > 0.0)) {
    throw ParameterError(
        "tmsv_subtracted_distribution: s must be > 0 (subtraction from vacuum "
        "has zero probability)");
  }
  if (n < 0) throw ParameterError("tmsv_subtracted_distribution: n must be >= 0");
  if (n == 0) return 0.0;
  const double t = std::tanh(s);
  const double cs = std::cosh(s) * std::sinh(s);
  return n * std::pow(t, 2 * n) / (cs * cs);
}

double effective_phonon_number(const CovarianceState& v) {
  const double n = (v.v(0, 0) + v.v(1, 1) - 1.0) / 2.0;
  if (n < -1e-9) {
    throw ParameterError(
        "effective_phonon_number: mechanical block is unphysical (n_eff = " +
        fmt(n) + ")");
  }
  return std::max(n, 0.0);
}

double logarithmic_negativity(const CovarianceState& v) {
  const Matrix2 a = v.v.topLeftCorner<2, 2>();
  const Matrix2 b = v.v.bottomRightCorner<2, 2>();
  const Matrix2 c = v.v.topRightCorner<2, 2>();
  // Partial transposition flips the sign of det(c); the smaller symplectic
  // eigenvalue of the transposed state follows from the two invariants.
  const double delta = a.determinant() + b.determinant() - 2.0 * c.determinant();
  const double disc = std::max(delta * delta - 4.0 * v.v.determinant(), 0.0);
  const double nu_sq = std::max((delta - std::sqrt(disc)) / 2.0, 0.0);
  const double nu = std::sqrt(nu_sq);
  if (nu <= 0.0) {
    throw ParameterError("logarithmic_negativity: covariance is singular");
  }
  return std::max(0.0, -std::log(2.0 * nu));
}

std::vector<double> fidelity_scan(const PhysicalParams& p,
                                  const std::vector<double>& t_grid,
                                  int threads) {
  if (t_grid.empty()) {
    throw ParameterError("fidelity_scan: time grid must be nonempty");
  }
  for (double t : t_grid) {
    if (!(t >= 0.0)) {
      throw ParameterError("fidelity_scan: grid times must be >= 0 (got " +
                           fmt(t) + ")");
    }
  }
  const DerivedParams derived = derive_params(p);
  const DriftMatrix k = drift_matrix(derived, p);
  const DiffusionMatrix d = diffusion_matrix(p, derived.thermal_occ);
  const StabilityReport stability = is_stable(k);
  if (!stability.stable) {
    throw InstabilityError(
        "fidelity_scan: parameters are dynamically unstable (spectral "
        "abscissa " +
        fmt(stability.spectral_abscissa) + " rad/s)");
  }
  const CovarianceState v0 = initial_covariance(derived.thermal_occ);

  std::vector<double> values(t_grid.size());
  detail::parallel_for(static_cast<int>(t_grid.size()), threads, [&](int i) {
    const CovarianceState v =
        propagate(v0, k, d, t_grid[static_cast<std::size_t>(i)]);
    const WignerCoefficients w = wigner_coefficients(block_decompose(v));
    values[static_cast<std::size_t>(i)] = fidelity(w, 1);
  });
  return values;
}

OptimalTime find_optimal_subtraction_time(const PhysicalParams& p,
                                          const std::vector<double>& t_grid) {
  const std::vector<double> values = fidelity_scan(p, t_grid);
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    // Strict comparison keeps the earliest grid point on ties.
    if (values[i] > values[best]) best = i;
  }
  return {t_grid[best], values[best]};
}

double wigner_norm_quadrature(const WignerCoefficients& w) {
  return quadrature_pass(w, 0).norm;
}

CovarianceState tmsv_covariance(double s) {
  const double ch = std::cosh(2.0 * s);
  const double sh = std::sinh(2.0 * s);
  CovarianceState state;
  state.v << ch, 0.0, sh, 0.0,
      0.0, ch, 0.0, -sh,
      sh, 0.0, ch, 0.0,
      0.0, -sh, 0.0, ch;
  state.v *= 0.5;
  state.time = 0.0;
  return state;
}

}  // namespace omsub

#include "pulseforge/damped_fit.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "pulseforge/constants.hpp"
#include "pulseforge/errors.hpp"

namespace pulseforge {

namespace {

constexpr std::size_t kZeroPad = 8;

// Fitting happens in scaled units u = (x - x0) / span, so all parameters are O(1).
struct Scaled {
  Eigen::VectorXd u;
  Eigen::VectorXd y;
  double x0 = 0.0;
  double span = 1.0;
};

double envelope_value(EnvelopeKind kind, double rate, double u) {
  const double a = rate * u;
  return kind == EnvelopeKind::exponential ? std::exp(-a) : std::exp(-a * a);
}

// Parameters: offset, amplitude, angular frequency (scaled), phase, sqrt(rate).
struct Residual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const Scaled* data;
  EnvelopeKind kind;

  int inputs() const { return 5; }
  int values() const { return static_cast<int>(data->u.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const double rate = p[4] * p[4];
    for (Eigen::Index k = 0; k < data->u.size(); ++k) {
      const double u = data->u[k];
      r[k] = p[0] + p[1] * envelope_value(kind, rate, u) * std::cos(p[2] * u + p[3]) - data->y[k];
    }
    return 0;
  }
};

// Linear least squares for offset + env*(a cos + b sin) at fixed frequency and rate.
// Returns the residual sum of squares and fills (offset, a, b).
double linear_projection(const Scaled& d, EnvelopeKind kind, double omega, double rate, Eigen::Vector3d& coef) {
  const Eigen::Index n = d.u.size();
  Eigen::MatrixXd basis(n, 3);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double e = envelope_value(kind, rate, d.u[k]);
    basis(k, 0) = 1.0;
    basis(k, 1) = e * std::cos(omega * d.u[k]);
    basis(k, 2) = e * std::sin(omega * d.u[k]);
  }
  coef = basis.colPivHouseholderQr().solve(d.y);
  return (basis * coef - d.y).squaredNorm();
}

double spectral_peak(const Scaled& d) {
  const std::size_t n = static_cast<std::size_t>(d.y.size());
  const double mean = d.y.mean();
  std::vector<double> padded(n * kZeroPad, 0.0);
  for (std::size_t k = 0; k < n; ++k) padded[k] = d.y[static_cast<Eigen::Index>(k)] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  const std::size_t half = padded.size() / 2;
  std::size_t peak = 0;
  double best = -1.0;
  for (std::size_t i = 0; i <= half; ++i) {
    const double m = std::abs(spectrum[i]);
    if (m > best) {
      best = m;
      peak = i;
    }
  }
  // A peak below one cycle across the record is indistinguishable from a trend.
  if (best <= 0.0 || peak < kZeroPad) throw FitDegenerateError("trace does not oscillate: spectral peak at DC");
  double refined = static_cast<double>(peak);
  if (peak > 0 && peak < half) {
    const double a = std::abs(spectrum[peak - 1]);
    const double b = std::abs(spectrum[peak]);
    const double c = std::abs(spectrum[peak + 1]);
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) refined += 0.5 * (a - c) / denom;
  }
  // Cycles per unit of u: u spans [0, 1] over n - 1 steps.
  const double cycles = refined / static_cast<double>(padded.size()) * static_cast<double>(n - 1);
  return constants::two_pi * cycles;
}

}  // namespace

std::string_view to_string(EnvelopeKind kind) noexcept {
  return kind == EnvelopeKind::exponential ? "exponential" : "gaussian";
}

EnvelopeKind envelope_from_string(std::string_view name) {
  if (name == "exponential") return EnvelopeKind::exponential;
  if (name == "gaussian") return EnvelopeKind::gaussian;
  throw ParameterError("unknown envelope kind '" + std::string(name) + "'");
}

DampedFit fit_damped_sinusoid(std::span<const double> x, std::span<const double> y, EnvelopeKind envelope) {
  const std::size_t n = x.size();
  if (n != y.size()) throw InputError("x and y lengths differ");
  if (n < 6) throw FitDegenerateError("need at least 6 points to fit a damped sinusoid");
  for (std::size_t k = 0; k < n; ++k)
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) throw InputError("trace contains non-finite values");

  Scaled d;
  d.x0 = x.front();
  d.span = x.back() - x.front();
  if (!(d.span > 0.0)) throw InputError("x must be increasing");
  const double step = d.span / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(x[k] - (d.x0 + static_cast<double>(k) * step)) > 1e-6 * step)
      throw InputError("damped-sinusoid fit needs uniformly spaced x");
  d.u.resize(static_cast<Eigen::Index>(n));
  d.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    d.u[static_cast<Eigen::Index>(k)] = (x[k] - d.x0) / d.span;
    d.y[static_cast<Eigen::Index>(k)] = y[k];
  }
  const double spread = d.y.maxCoeff() - d.y.minCoeff();
  if (!(spread > 1e-12 * std::max(1.0, d.y.cwiseAbs().maxCoeff())))
    throw FitDegenerateError("trace is constant: nothing to fit");

  // Frequency from the spectrum, then a variable-projection scan over frequency
  // (within one FFT bin) and decay rate seeds the nonlinear fit.
  const double omega_fft = spectral_peak(d);
  const double bin = constants::two_pi / kZeroPad;
  std::vector<double> rates{0.0};
  for (double r = 0.01; r <= 30.0; r *= 1.25) rates.push_back(r);
  double best_rss = std::numeric_limits<double>::infinity();
  double best_omega = omega_fft;
  double best_rate = 0.0;
  Eigen::Vector3d best_coef = Eigen::Vector3d::Zero();
  for (int j = -10; j <= 10; ++j) {
    const double omega = omega_fft + bin * j / 10.0;
    if (omega <= 0.0) continue;
    for (double rate : rates) {
      Eigen::Vector3d coef;
      const double rss = linear_projection(d, envelope, omega, rate, coef);
      if (rss < best_rss) {
        best_rss = rss;
        best_omega = omega;
        best_rate = rate;
        best_coef = coef;
      }
    }
  }

  Eigen::VectorXd p(5);
  p[0] = best_coef[0];
  p[1] = std::hypot(best_coef[1], best_coef[2]);
  p[2] = best_omega;
  p[3] = std::atan2(-best_coef[2], best_coef[1]);
  p[4] = std::sqrt(best_rate);
  if (p[4] == 0.0) p[4] = 1e-3;

  Residual functor{&d, envelope};
  Eigen::NumericalDiff<Residual> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residual>> lm(numdiff);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 4000;
  lm.minimize(p);

  // Canonical sign conventions: positive amplitude and frequency.
  if (p[2] < 0.0) {
    p[2] = -p[2];
    p[3] = -p[3];
  }
  if (p[1] < 0.0) {
    p[1] = -p[1];
    p[3] += constants::pi;
  }
  p[3] = std::remainder(p[3], constants::two_pi);

  Eigen::VectorXd r(static_cast<Eigen::Index>(n));
  functor(p, r);
  const double rss = r.squaredNorm();

  // Covariance from the Jacobian at the optimum, with the rate reparameterized.
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 5);
  numdiff.df(p, jac);
  const double dof = std::max<double>(1.0, static_cast<double>(n) - 5.0);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse() * (rss / dof);

  DampedFit out;
  out.envelope = envelope;
  out.points = n;
  out.offset = p[0];
  out.amplitude = p[1];
  out.contrast = 2.0 * p[1];
  out.frequency = p[2] / d.span;
  out.phase = p[3] - p[2] * d.x0 / d.span;
  out.phase = std::remainder(out.phase, constants::two_pi);
  const double rate = p[4] * p[4];
  const double min_rate = 1e-9;
  out.decay_1e = rate > min_rate ? d.span / rate : std::numeric_limits<double>::infinity();
  out.residual_rms = std::sqrt(rss / static_cast<double>(n));
  out.frequency_stderr = std::sqrt(std::max(0.0, cov(2, 2))) / d.span;
  out.contrast_stderr = 2.0 * std::sqrt(std::max(0.0, cov(1, 1)));
  // decay = span / s^2, d(decay)/ds = -2 span / s^3
  if (std::isfinite(out.decay_1e)) {
    const double s = std::abs(p[4]);
    out.decay_stderr = 2.0 * d.span / (s * s * s) * std::sqrt(std::max(0.0, cov(4, 4)));
  } else {
    out.decay_stderr = std::numeric_limits<double>::infinity();
  }
  const double periods = out.frequency * d.span / constants::two_pi;
  out.undersampled = periods < 4.0 || static_cast<double>(n - 1) / periods < 8.0;
  return out;
}

DampedFit fit_damped_sinusoid(const TraceResult& trace, EnvelopeKind envelope) {
  return fit_damped_sinusoid(trace.x, trace.p0_mean, envelope);
}

}  // namespace pulseforge

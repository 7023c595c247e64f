// Polya-Gamma variates.
//
// PG(1, c) uses the alternating-series rejection sampler of Devroye as laid
// out for the Polya-Gamma case by Windle (2013, Algorithm 6). Real b is
// handled by adding floor(b) unit draws to a draw for the fractional part,
// which comes from the Gamma-series representation
//     PG(b, c) = 1 / (2 pi^2) * sum_k g_k / ((k - 1/2)^2 + c^2 / (4 pi^2)),
//     g_k ~ Gamma(b, 1),
// truncated after a fixed number of terms with the remainder replaced by its
// exact mean.

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "blocksampler/distributions.hpp"

namespace blocksampler {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
constexpr double kTruncation = 2.0 / kPi;  // t = 0.64 in Windle's notation
// Above this many unit summands the series draw is cheaper than the sum.
constexpr double kUnitSumLimit = 32.0;

double log_normal_cdf(double x) { return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2)); }

// Coefficient a_n(x) of the alternating series for J*(1, 0).
double series_coefficient(int n, double x) {
  const double k = n + 0.5;
  if (x <= kTruncation) {
    return std::exp(std::log(kPi) + std::log(k) + 1.5 * (std::log(2.0 / kPi) - std::log(x)) - 2.0 * k * k / x);
  }
  return std::exp(std::log(kPi) + std::log(k) - x * 0.5 * kPi2 * k * k);
}

// Probability of proposing from the right (exponential) piece.
double right_piece_probability(double z) {
  const double K = 0.5 * z * z + kPi2 / 8.0;
  const double log_a = std::log(4.0) - std::log(kPi) - z;
  const double log_k = std::log(K);
  const double kt = K * kTruncation;
  const double w = std::sqrt(0.5 * kPi);
  const double log_f1 = log_a + log_normal_cdf(w * (kTruncation * z - 1.0)) + log_k + kt;
  const double log_f2 = log_a + 2.0 * z + log_normal_cdf(-w * (kTruncation * z + 1.0)) + log_k + kt;
  return 1.0 / (1.0 + std::exp(log_f1) + std::exp(log_f2));
}

// Gamma(1/2)-type draw truncated to (pi/2, inf), used when the inverse
// Gaussian mean exceeds the truncation point.
double truncated_gamma(RngStream& rng) {
  const double c = 0.5 * kPi;
  while (true) {
    const double x = rng.exponential() * 2.0 + c;
    if (rng.uniform() <= std::sqrt(c / x)) return x;
  }
}

double inverse_gaussian(double mu, RngStream& rng) {
  const double n = rng.normal();
  const double v = n * n;
  double out = mu + 0.5 * mu * (mu * v - std::sqrt(4.0 * mu * v + mu * mu * v * v));
  if (rng.uniform() > mu / (mu + out)) out = mu * mu / out;
  return out;
}

// Inverse Gaussian(1/z, 1) truncated to (0, t).
double truncated_inverse_gaussian(double z, RngStream& rng) {
  if (z < 1.0 / kTruncation) {
    while (true) {
      const double x = 1.0 / truncated_gamma(rng);
      if (std::log(rng.uniform()) < -0.5 * z * z * x) return x;
    }
  }
  const double mu = 1.0 / z;
  double x = kTruncation + 1.0;
  while (x >= kTruncation) x = inverse_gaussian(mu, rng);
  return x;
}

}  // namespace

double polya_gamma_mean(double b, double c) {
  const double a = std::fabs(c);
  if (a < 1e-6) return 0.25 * b * (1.0 - a * a / 12.0);
  return b / (2.0 * a) * std::tanh(0.5 * a);
}

namespace detail {

double polya_gamma_unit(double c, RngStream& rng) {
  const double z = 0.5 * std::fabs(c);
  const double K = 0.5 * z * z + kPi2 / 8.0;
  const double p_right = right_piece_probability(z);
  while (true) {
    double x;
    if (rng.uniform() < p_right) {
      x = kTruncation + rng.exponential() / K;
    } else {
      x = truncated_inverse_gaussian(z, rng);
    }
    double s = series_coefficient(0, x);
    const double y = rng.uniform() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= series_coefficient(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += series_coefficient(n, x);
        if (y > s) break;
      }
    }
  }
}

double polya_gamma_series(double b, double c, RngStream& rng, int terms) {
  const double shift = c * c / (4.0 * kPi2);
  // one distribution object for all terms; shapes below one use
  // Gamma(b) = Gamma(b + 1) * U^(1/b)
  const bool boost = b < 1.0;
  std::gamma_distribution<double> gamma(boost ? b + 1.0 : b, 1.0);
  double draw = 0.0;
  double head_mean = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double d = (k - 0.5) * (k - 0.5) + shift;
    double g = gamma(rng.engine());
    if (boost) g *= std::exp(std::log(rng.uniform()) / b);
    draw += g / d;
    head_mean += 1.0 / d;
  }
  const double scale = 1.0 / (2.0 * kPi2);
  const double tail = polya_gamma_mean(b, c) - b * scale * head_mean;
  return scale * draw + std::max(tail, 0.0);
}

}  // namespace detail

double sample_polya_gamma(double b, double c, RngStream& rng) {
  if (!(b > 0.0) || !std::isfinite(b)) throw std::domain_error("Polya-Gamma shape b must be positive and finite");
  if (!std::isfinite(c)) throw std::domain_error("Polya-Gamma tilt c must be finite");
  const double whole = std::floor(b);
  if (whole > kUnitSumLimit) return detail::polya_gamma_series(b, c, rng);
  double out = 0.0;
  for (int i = 0; i < static_cast<int>(whole); ++i) out += detail::polya_gamma_unit(c, rng);
  const double frac = b - whole;
  if (frac > 1e-12) out += detail::polya_gamma_series(frac, c, rng);
  return out;
}

}  // namespace blocksampler

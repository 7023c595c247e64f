#include "blocksampler/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace blocksampler {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace

double log_gamma_fn(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) {
  return log_gamma_fn(a) + log_gamma_fn(b) - log_gamma_fn(a + b);
}

double log_rising_factorial(double x, std::int64_t n) {
  if (n == 0) return 0.0;
  return log_gamma_fn(x + static_cast<double>(n)) - log_gamma_fn(x);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double hi = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log_logistic(double eta) {
  // -softplus(-eta)
  if (eta >= 0.0) return -std::log1p(std::exp(-eta));
  return eta - std::log1p(std::exp(eta));
}

void ZinbParams::validate() const {
  require(std::isfinite(p) && std::isfinite(psi) && std::isfinite(r), "ZINB parameter is not finite");
  require(p >= 0.0 && p <= 1.0, "ZINB zero-inflation probability outside [0, 1]");
  require(psi > 0.0 && psi <= 1.0, "ZINB success probability outside (0, 1]");
  require(r > 0.0, "ZINB dispersion must be positive");
}

double nb_log_pmf(std::int64_t w, double psi, double r) {
  if (w < 0) return kNegInf;
  const double wd = static_cast<double>(w);
  double tail = 0.0;
  if (w > 0) tail = psi < 1.0 ? wd * std::log1p(-psi) : kNegInf;
  return log_gamma_fn(wd + r) - log_gamma_fn(r) - log_gamma_fn(wd + 1.0) + r * std::log(psi) + tail;
}

double zinb_log_pmf(std::int64_t a, const ZinbParams& params) {
  params.validate();
  require(a >= 0, "ZINB count must be nonnegative");
  const double log_keep = params.p < 1.0 ? std::log1p(-params.p) : kNegInf;
  const double count_part = log_keep + nb_log_pmf(a, params.psi, params.r);
  if (a > 0) return count_part;
  const double log_p = params.p > 0.0 ? std::log(params.p) : kNegInf;
  return log_add_exp(log_p, count_part);
}

double zinb_pmf(std::int64_t a, const ZinbParams& params) { return std::exp(zinb_log_pmf(a, params)); }

Moments zinb_moments(const ZinbParams& params) {
  params.validate();
  const double keep = 1.0 - params.p;
  const double nb_mean = params.r * (1.0 - params.psi) / params.psi;
  const double nb_var = nb_mean / params.psi;
  return {keep * nb_mean, keep * (nb_var + params.p * nb_mean * nb_mean)};
}

Moments zip_moments(double p, double lambda) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "ZIP zero-inflation probability outside [0, 1]");
  require(std::isfinite(lambda) && lambda > 0.0, "ZIP rate must be positive");
  const double mean = (1.0 - p) * lambda;
  return {mean, mean * (1.0 + p * lambda)};
}

double GammaLaplace::psi() const { return std::exp(log_psi); }
double GammaLaplace::kappa() const { return std::exp(log_kappa); }

GammaLaplace gamma_laplace(const GammaLaplaceTerms& t) {
  require(t.u >= 0.0 && t.gamma > 0.0 && t.K >= 1 && t.n >= 0, "invalid Laplace-transform arguments");
  const double shape = t.gamma / t.K;
  const double log_base = -std::log1p(t.u);
  GammaLaplace out;
  out.log_psi = shape * log_base;
  out.log_kappa = log_rising_factorial(shape, t.n) + (shape + static_cast<double>(t.n)) * log_base;
  return out;
}

double bnb_log_pmf(std::int64_t m, double alpha, double a, double b) {
  if (m < 0) return kNegInf;
  const double md = static_cast<double>(m);
  return log_gamma_fn(alpha + md) - log_gamma_fn(alpha) - log_gamma_fn(md + 1.0) + log_beta(alpha + a, md + b) -
         log_beta(a, b);
}

double f_log_pdf(double x, double d1, double d2) {
  if (!(x > 0.0)) return kNegInf;
  return 0.5 * (d1 * std::log(d1 * x) + d2 * std::log(d2) - (d1 + d2) * std::log(d1 * x + d2)) - std::log(x) -
         log_beta(0.5 * d1, 0.5 * d2);
}

double gamma_log_pdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - log_gamma_fn(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double beta_log_pdf(double x, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

double sample_log_gamma(RngStream& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw std::domain_error("Gamma draw needs positive finite shape and rate, got shape=" + std::to_string(shape) +
                            " rate=" + std::to_string(rate));
  }
  if (shape >= 1.0) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return std::log(dist(rng.engine())) - std::log(rate);
  }
  // Gamma(a) = Gamma(a + 1) * U^(1/a)
  std::gamma_distribution<double> dist(shape + 1.0, 1.0);
  return std::log(dist(rng.engine())) + std::log(rng.uniform()) / shape - std::log(rate);
}

double sample_gamma(RngStream& rng, double shape, double rate) {
  if (shape >= 1.0 && shape > 0.0 && rate > 0.0 && std::isfinite(shape) && std::isfinite(rate)) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(rng.engine()) / rate;
  }
  return std::exp(sample_log_gamma(rng, shape, rate));
}

double sample_beta(RngStream& rng, double a, double b) {
  const double lx = sample_log_gamma(rng, a, 1.0);
  const double ly = sample_log_gamma(rng, b, 1.0);
  return std::exp(lx - log_add_exp(lx, ly));
}

bool sample_bernoulli(RngStream& rng, double p) { return rng.uniform() < p; }

std::int64_t sample_poisson(RngStream& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng.engine());
}

std::int64_t sample_negative_binomial(RngStream& rng, double psi, double r) {
  if (!(psi > 0.0 && psi <= 1.0) || !(r > 0.0)) throw std::domain_error("invalid negative binomial parameters");
  if (psi == 1.0) return 0;
  const double lambda = sample_gamma(rng, r, psi / (1.0 - psi));
  return sample_poisson(rng, lambda);
}

double sample_f(RngStream& rng, double d1, double d2) {
  const double num = sample_gamma(rng, 0.5 * d1, 0.5) / d1;
  const double den = sample_gamma(rng, 0.5 * d2, 0.5) / d2;
  return num / den;
}

std::vector<double> sample_dirichlet(RngStream& rng, std::span<const double> alpha) {
  std::vector<double> logs(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) logs[i] = sample_log_gamma(rng, alpha[i], 1.0);
  const double total = log_sum_exp(logs);
  for (double& v : logs) v = std::exp(v - total);
  return logs;
}

std::size_t sample_categorical_log(RngStream& rng, std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::domain_error("categorical draw over an empty support");
  const double hi = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(hi)) throw std::domain_error("categorical log weights have no finite maximum");
  double total = 0.0;
  for (double v : log_weights) total += std::exp(v - hi);
  double target = rng.uniform() * total;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    target -= std::exp(log_weights[i] - hi);
    if (target <= 0.0) return i;
  }
  // Round-off: return the last index with nonzero mass.
  for (std::size_t i = log_weights.size(); i-- > 0;) {
    if (std::isfinite(log_weights[i])) return i;
  }
  return log_weights.size() - 1;
}

std::size_t sample_categorical(RngStream& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::domain_error("categorical weights must have positive total");
  double target = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    target -= weights[i];
    if (target <= 0.0) return i;
  }
  return weights.size() - 1;
}

double propose_log_normal(RngStream& rng, double current, double sd) {
  return std::exp(std::log(current) + sd * rng.normal());
}

}  // namespace blocksampler

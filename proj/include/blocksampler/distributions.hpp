#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blocksampler/rng.hpp"

namespace blocksampler {

// ---------------------------------------------------------------------------
// Special functions. All evaluations are in log space.
// ---------------------------------------------------------------------------

/// Thread-safe log|Gamma(x)|.
double log_gamma_fn(double x);
double log_beta(double a, double b);
/// log of the rising factorial x (x+1) ... (x+n-1); zero for n = 0.
double log_rising_factorial(double x, std::int64_t n);
double log_sum_exp(std::span<const double> values);
double log_add_exp(double a, double b);

double logistic(double eta);
/// log(logistic(eta)), stable for large |eta|.
double log_logistic(double eta);

// ---------------------------------------------------------------------------
// Zero-inflated negative binomial.
//
// The negative binomial component uses the parameterisation
//     NB(w; psi, r) = Gamma(w + r) / (Gamma(r) w!) * psi^r * (1 - psi)^w,
// so psi is the probability mass pushed towards zero and the mean is
// r (1 - psi) / psi. Every sampler in this library follows that convention.
// ---------------------------------------------------------------------------

struct ZinbParams {
  double p = 0.0;    ///< zero-inflation probability, [0, 1]
  double psi = 0.5;  ///< NB success probability, (0, 1]
  double r = 1.0;    ///< NB dispersion, (0, inf)

  /// Throws std::domain_error when a field is non-finite or out of range.
  void validate() const;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

double nb_log_pmf(std::int64_t w, double psi, double r);
double zinb_log_pmf(std::int64_t a, const ZinbParams& params);
double zinb_pmf(std::int64_t a, const ZinbParams& params);
Moments zinb_moments(const ZinbParams& params);
Moments zip_moments(double p, double lambda);

/// Laplace transform psi(u; K) and cumulant kappa(u; n, K) of Gamma(gamma/K, 1).
struct GammaLaplaceTerms {
  double u = 0.0;
  double gamma = 1.0;
  int K = 1;
  std::int64_t n = 0;
};

struct GammaLaplace {
  double log_psi = 0.0;
  double log_kappa = 0.0;
  double psi() const;
  double kappa() const;
};

GammaLaplace gamma_laplace(const GammaLaplaceTerms& terms);

/// Beta-negative-binomial log pmf, used as the prior on K - 1.
double bnb_log_pmf(std::int64_t m, double alpha, double a, double b);
/// Snedecor F(d1, d2) log density, used as the prior on the concentration.
double f_log_pdf(double x, double d1, double d2);
/// Gamma(shape, rate) log density.
double gamma_log_pdf(double x, double shape, double rate);
double beta_log_pdf(double x, double a, double b);

// ---------------------------------------------------------------------------
// Random variates.
// ---------------------------------------------------------------------------

double sample_gamma(RngStream& rng, double shape, double rate);
/// log of a Gamma(shape, rate) draw; stays finite for shapes far below one.
double sample_log_gamma(RngStream& rng, double shape, double rate);
double sample_beta(RngStream& rng, double a, double b);
bool sample_bernoulli(RngStream& rng, double p);
std::int64_t sample_poisson(RngStream& rng, double mean);
/// NB(psi, r) in the parameterisation above (Gamma-Poisson mixture).
std::int64_t sample_negative_binomial(RngStream& rng, double psi, double r);
double sample_f(RngStream& rng, double d1, double d2);
std::vector<double> sample_dirichlet(RngStream& rng, std::span<const double> alpha);
/// Index drawn with probability proportional to exp(log_weights[i]).
std::size_t sample_categorical_log(RngStream& rng, std::span<const double> log_weights);
std::size_t sample_categorical(RngStream& rng, std::span<const double> weights);
/// exp(log(current) + sd * N(0, 1)).
double propose_log_normal(RngStream& rng, double current, double sd);

// ---------------------------------------------------------------------------
// Polya-Gamma PG(b, c).
// ---------------------------------------------------------------------------

/// E[PG(b, c)] = b / (2c) tanh(c / 2), with limit b / 4 at c = 0.
double polya_gamma_mean(double b, double c);
/// Draw from PG(b, c) for any real b > 0.
double sample_polya_gamma(double b, double c, RngStream& rng);

namespace detail {
/// Exact draw from PG(1, c) (alternating-series rejection sampler).
double polya_gamma_unit(double c, RngStream& rng);
/// PG(b, c) through the first `terms` summands of its Gamma-series
/// representation, the remainder replaced by its mean.
double polya_gamma_series(double b, double c, RngStream& rng, int terms = 200);
}  // namespace detail

}  // namespace blocksampler

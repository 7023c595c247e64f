#include "blocksampler/dmfm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "blocksampler/distributions.hpp"
#include "blocksampler/error.hpp"

namespace blocksampler {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGammaPriorD1 = 6.0;
constexpr double kGammaPriorD2 = 3.0;

// log of sup_{m' >= M} w(m') / q_K(m').
double log_tail_envelope(std::span<const int> counts, double gamma, double u, int M) {
  const double x = gamma / M;
  double total = 0.0;
  for (int c : counts) total += c;
  double out = -(gamma + total) * std::log1p(u) + static_cast<double>(counts.size()) * std::log(gamma);
  for (int c : counts) out += log_gamma_fn(x + c) - log_gamma_fn(x + 1.0);
  return out;
}

double log_component_weight(std::span<const int> counts, double gamma, double u, int m, double log_prior) {
  const int k = static_cast<int>(counts.size());
  const double x = gamma / m;
  const double log_base = -std::log1p(u);
  double out = log_gamma_fn(m + 1.0) - log_gamma_fn(m - k + 1.0) + (m - k) * x * log_base + log_prior;
  for (int c : counts) out += log_rising_factorial(x, c) + (x + c) * log_base;
  return out;
}

}  // namespace

void DmfmConfig::validate() const {
  if (!(bnb_alpha > 0.0 && bnb_a > 0.0 && bnb_b > 0.0)) throw InputError("BNB hyperparameters must be positive");
  if (!(gamma_proposal_sd > 0.0)) throw InputError("gamma_proposal_sd must be positive");
  if (k_max < 1) throw InputError("k_max must be at least 1");
  if (!(tail_tol > 0.0 && tail_tol <= 1e-6)) throw InputError("tail_tol must lie in (0, 1e-6]");
  if (fixed_k < 0 || (fixed_k > 0 && fixed_k > k_max)) throw InputError("fixed_k must lie in 1..k_max");
}

double DmfmConfig::log_prior_k(int m) const {
  if (m < 1 || m > k_max) return kNegInf;
  if (fixed_k > 0) return m == fixed_k ? 0.0 : kNegInf;
  return bnb_log_pmf(m - 1, bnb_alpha, bnb_a, bnb_b);
}

double sample_auxiliary_u(int n, std::span<const double> log_s, RngStream& rng) {
  const double total = std::exp(log_sum_exp(log_s));
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("auxiliary update needs a positive finite weight total, got " + std::to_string(total));
  }
  return sample_gamma(rng, static_cast<double>(n), total);
}

double log_concentration_target(double gamma, double u, std::span<const int> occupied_counts, int K) {
  if (!(gamma > 0.0)) return kNegInf;
  const int k = static_cast<int>(occupied_counts.size());
  const double x = gamma / K;
  const double log_base = -std::log1p(u);
  double out = (K - k) * x * log_base + f_log_pdf(gamma, kGammaPriorD1, kGammaPriorD2);
  for (int c : occupied_counts) out += log_rising_factorial(x, c) + (x + c) * log_base;
  return out;
}

ConcentrationUpdate update_concentration(double gamma, double u, std::span<const int> occupied_counts, int K,
                                         double sd, RngStream& rng) {
  const double proposal = propose_log_normal(rng, gamma, sd);
  const double log_ratio = log_concentration_target(proposal, u, occupied_counts, K) -
                           log_concentration_target(gamma, u, occupied_counts, K) + std::log(proposal) -
                           std::log(gamma);
  if (std::log(rng.uniform()) < log_ratio) return {proposal, true};
  return {gamma, false};
}

std::vector<double> component_count_logweights(std::span<const int> occupied_counts, double gamma, double u,
                                               const DmfmConfig& cfg, int m_last) {
  const int k = static_cast<int>(occupied_counts.size());
  std::vector<double> out;
  for (int m = k; m <= m_last; ++m) {
    out.push_back(log_component_weight(occupied_counts, gamma, u, m, cfg.log_prior_k(m)));
  }
  return out;
}

ComponentCountDraw sample_num_components(std::span<const int> occupied_counts, double gamma, double u,
                                         const DmfmConfig& cfg, RngStream& rng) {
  const int k = static_cast<int>(occupied_counts.size());
  if (k < 1) throw NumericalError("component-count update needs at least one occupied component");
  if (cfg.fixed_k > 0) {
    if (cfg.fixed_k < k) throw NumericalError("occupied components exceed the fixed K");
    return {cfg.fixed_k, cfg.fixed_k, false};
  }
  if (k > cfg.k_max) throw NumericalError("occupied components exceed k_max");

  double prior_cdf = 0.0;
  for (int m = 1; m < k; ++m) prior_cdf += std::exp(cfg.log_prior_k(m));

  std::vector<double> log_w;
  double log_total = kNegInf;
  const double log_tol = std::log(cfg.tail_tol);
  ComponentCountDraw draw;
  for (int m = k;; ++m) {
    const double log_prior = cfg.log_prior_k(m);
    log_w.push_back(log_component_weight(occupied_counts, gamma, u, m, log_prior));
    log_total = log_add_exp(log_total, log_w.back());
    prior_cdf += std::exp(log_prior);
    const double survival = 1.0 - prior_cdf;
    const double log_bound =
        survival > 0.0 ? log_tail_envelope(occupied_counts, gamma, u, m + 1) + std::log(survival) : kNegInf;
    const bool converged = log_bound - log_total < log_tol;
    if (converged || m >= cfg.k_max) {
      draw.support_end = m;
      draw.cap_hit = !converged;
      break;
    }
  }
  if (!std::isfinite(log_total)) {
    std::string dump = "component-count weights underflow: k=" + std::to_string(k) + " gamma=" + std::to_string(gamma) +
                       " u=" + std::to_string(u) + " counts=";
    for (int c : occupied_counts) dump += std::to_string(c) + " ";
    throw NumericalError(dump);
  }
  draw.K = k + static_cast<int>(sample_categorical_log(rng, log_w));
  return draw;
}

std::vector<double> sample_unnormalized_weights(std::span<const int> occupied_counts, double gamma, int K, double u,
                                                RngStream& rng) {
  const int k = static_cast<int>(occupied_counts.size());
  if (K < k) throw NumericalError("K below the number of occupied components");
  std::vector<double> log_s(K);
  const double shape = gamma / K;
  for (int m = 0; m < K; ++m) {
    const double extra = m < k ? occupied_counts[m] : 0.0;
    log_s[m] = sample_log_gamma(rng, shape + extra, u + 1.0);
  }
  return log_s;
}

MixturePriorDraw sample_mixture_prior(const DmfmConfig& cfg, RngStream& rng) {
  MixturePriorDraw draw;
  if (cfg.fixed_k > 0) {
    draw.K = cfg.fixed_k;
  } else {
    std::vector<double> log_q(cfg.k_max);
    for (int m = 1; m <= cfg.k_max; ++m) log_q[m - 1] = cfg.log_prior_k(m);
    draw.K = 1 + static_cast<int>(sample_categorical_log(rng, log_q));
  }
  draw.gamma = sample_f(rng, kGammaPriorD1, kGammaPriorD2);
  draw.log_s.resize(draw.K);
  for (double& v : draw.log_s) v = sample_log_gamma(rng, draw.gamma / draw.K, 1.0);
  return draw;
}

}  // namespace blocksampler

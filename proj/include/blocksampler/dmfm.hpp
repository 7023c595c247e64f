#pragma once

#include <span>
#include <vector>

#include "blocksampler/partition.hpp"
#include "blocksampler/rng.hpp"

namespace blocksampler {

/// Hyperparameters of the dynamic mixture of finite mixtures.
///
/// K - 1 ~ BNB(bnb_alpha, bnb_a, bnb_b) truncated to K <= k_max, the
/// concentration gamma ~ F(6, 3), and the weights are Dirichlet(gamma/K)
/// through unnormalised Gamma(gamma/K, 1) variables S.
struct DmfmConfig {
  double bnb_alpha = 1.0;
  double bnb_a = 4.0;
  double bnb_b = 3.0;
  double gamma_proposal_sd = 0.1;
  int k_max = 150;
  double tail_tol = 1e-10;
  /// When positive, K is held at this value (point-mass prior on K).
  int fixed_k = 0;

  void validate() const;
  /// log q_K(m), the prior on the number of components, for m >= 1.
  double log_prior_k(int m) const;
};

/// U_n | S ~ Gamma(n, T), T = sum_m S_m.
double sample_auxiliary_u(int n, std::span<const double> log_s, RngStream& rng);

/// Unnormalised log target of the concentration given (u, partition, K):
/// sum_j log kappa(u; n_j, K) + (K - k) log psi(u; K) + log F(gamma; 6, 3).
double log_concentration_target(double gamma, double u, std::span<const int> occupied_counts, int K);

struct ConcentrationUpdate {
  double gamma = 1.0;
  bool accepted = false;
};

/// Random-walk Metropolis-Hastings on log gamma with proposal sd `sd`.
ConcentrationUpdate update_concentration(double gamma, double u, std::span<const int> occupied_counts, int K,
                                         double sd, RngStream& rng);

/// log P(K = m | rest) up to a constant for m = k..m_last.
std::vector<double> component_count_logweights(std::span<const int> occupied_counts, double gamma, double u,
                                               const DmfmConfig& cfg, int m_last);

struct ComponentCountDraw {
  int K = 1;
  int support_end = 1;   ///< largest m that received weight
  bool cap_hit = false;  ///< k_max reached before the tail bound fell below tail_tol
};

/// Draws K from its full conditional on m = k, k+1, ..., truncated where a
/// bound on the remaining mass drops below tail_tol or at k_max.
ComponentCountDraw sample_num_components(std::span<const int> occupied_counts, double gamma, double u,
                                         const DmfmConfig& cfg, RngStream& rng);

/// log S for K components: the first k (occupied, in order) draw from
/// Gamma(gamma/K + n_m, u + 1), the rest from Gamma(gamma/K, u + 1).
std::vector<double> sample_unnormalized_weights(std::span<const int> occupied_counts, double gamma, int K, double u,
                                                RngStream& rng);

/// Forward draw of (K, gamma, log S) from the prior; used for initial values
/// and for simulation-based checks.
struct MixturePriorDraw {
  int K = 1;
  double gamma = 1.0;
  std::vector<double> log_s;
};
MixturePriorDraw sample_mixture_prior(const DmfmConfig& cfg, RngStream& rng);

}  // namespace blocksampler

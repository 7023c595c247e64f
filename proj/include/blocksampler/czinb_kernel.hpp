#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blocksampler/matrix.hpp"
#include "blocksampler/network.hpp"
#include "blocksampler/partition.hpp"
#include "blocksampler/rng.hpp"
#include "blocksampler/sweep.hpp"

namespace blocksampler {

/// beta_s,lm ~ N(b0, B0) for s = 1, 2 and the global r ~ Gamma(a_r, b_r).
struct CzinbPriors {
  Eigen::VectorXd b0;
  Eigen::MatrixXd B0;
  double a_r = 1.0;
  double b_r = 1.0;

  /// b0 = 0 and B0 = scale * I in dimension d.
  static CzinbPriors isotropic(int d, double scale = 10.0);
  void validate(int d) const;
};

/// Coefficients of the NB success probability (beta1) and of the
/// zero-inflation probability (beta2), plus the shared dispersion.
struct CzinbParams {
  BlockTensor beta1;
  BlockTensor beta2;
  double r = 1.0;

  int blocks() const { return beta1.blocks(); }
};

struct PairProbabilities {
  double p = 0.0;
  double psi = 0.5;
};

/// psi_ij = logistic(y' beta1), p_ij = logistic(y' beta2).
PairProbabilities logistic_links(std::span<const double> y, std::span<const double> beta1,
                                 std::span<const double> beta2);

/// Polya-Gamma variables of both logistic links, per pair.
struct PgAugmentation {
  SymmetricMatrix<double> omega1;
  SymmetricMatrix<double> omega2;
};

struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Conditional of one block's coefficients given the Polya-Gamma
/// variables: rows of Y are the pair covariates, kappa and omega the
/// matching pseudo-observations.
GaussianPosterior block_gaussian_params(const Eigen::MatrixXd& Y, const Eigen::VectorXd& kappa,
                                        const Eigen::VectorXd& omega, const CzinbPriors& priors);

/// From-scratch label log-probabilities for node i (including log S_c)
/// with both coefficient sets integrated out given Omega; z[i] is ignored.
std::vector<double> czinb_collapsed_label_logweights(int i, std::span<const int> z, const CovariateTensor& y,
                                                     const LatentEdges& latent, const PgAugmentation& pg, double r,
                                                     std::span<const double> log_s, const CzinbPriors& priors);

/// Imputes (X, W) for every pair given coefficients and r.
LatentEdges czinb_sample_latent_edges(const AdjacencyMatrix& a, const CovariateTensor& y, std::span<const int> z,
                                      const CzinbParams& params, RngStream& rng);

/// omega1 ~ PG(w + r, eta1), omega2 ~ PG(1, eta2) per pair.
PgAugmentation sample_pg_augmentation(const CovariateTensor& y, std::span<const int> z, const LatentEdges& latent,
                                      const CzinbParams& params, RngStream& rng);

/// Covariate-dependent ZINB kernel.
class CzinbKernel {
 public:
  /// `y` is the design used by the links (already standardised, with any
  /// intercept column).
  CzinbKernel(AdjacencyMatrix a, CovariateTensor y, CzinbPriors priors, double r_proposal_sd = 0.2);

  /// Coefficients at b0, r = 1, one imputation of (X, W) and Omega.
  void initialize(const PartitionState& state, RngStream& rng);

  void begin_label_scan(const PartitionState& state);
  void remove_node(int i, std::span<const int> z);
  void label_logweights(int i, std::span<const int> z, std::span<double> out) const;
  void add_node(int i, int c);
  void check_consistency(const PartitionState& state) const;

  /// Coefficients, global r (Omega integrated out), (X, W), then Omega.
  void update_parameters(const PartitionState& state, RngStream& rng, SweepStats& stats);
  void permute(std::span<const int> perm);
  void refresh_empty(int K, int k, RngStream& rng);
  void adapt_proposals(int iteration);

  const CzinbParams& params() const { return params_; }
  void set_params(CzinbParams params);
  const LatentEdges& latent() const { return latent_; }
  const PgAugmentation& augmentation() const { return pg_; }
  const AdjacencyMatrix& adjacency() const { return a_; }
  const CovariateTensor& covariates() const { return y_; }
  void set_data(AdjacencyMatrix a, LatentEdges latent, PgAugmentation pg);
  const CzinbPriors& priors() const { return priors_; }
  int dim() const { return d_; }

 private:
  std::size_t block_offset(int s, int l, int m) const;
  void add_block_info(int s, int l, int m, const double* prec, const double* lin, double sign);
  void accumulate_pair(int i, int j, double* prec1, double* lin1, double* prec2, double* lin2) const;
  Eigen::VectorXd draw_prior_coefficients(RngStream& rng) const;

  AdjacencyMatrix a_;
  CovariateTensor y_;
  CzinbPriors priors_;
  int d_;
  Eigen::MatrixXd prior_precision_;
  Eigen::VectorXd prior_linear_;
  Eigen::MatrixXd prior_chol_;
  double log_sd_;
  bool last_accepted_ = false;

  CzinbParams params_;
  LatentEdges latent_;
  PgAugmentation pg_;

  int K_ = 0;
  std::vector<double> info_;       ///< per (s, l, m): d*d precision then d linear terms, data part only
  std::vector<double> node_info_;  ///< per (s, m): contribution of the removed node
  std::vector<Count> node_count_;
  mutable std::vector<double> work_;
};

}  // namespace blocksampler

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "blocksampler/matrix.hpp"
#include "blocksampler/network.hpp"
#include "blocksampler/partition.hpp"
#include "blocksampler/rng.hpp"
#include "blocksampler/sweep.hpp"

namespace blocksampler {

/// p ~ Beta(a_p, b_p), lambda ~ Gamma(a_lambda, b_lambda) (rate).
struct ZipPriors {
  double a_p = 1.0;
  double b_p = 1.0;
  double a_lambda = 1.0;
  double b_lambda = 1.0;

  void validate() const;
};

struct ZipBlockParams {
  BlockTensor p;
  BlockTensor lambda;

  int blocks() const { return p.blocks(); }
  ZipBlockParams permuted(std::span<const int> perm) const;
};

/// Label log-likelihoods for node i with p and lambda integrated out.
void zip_label_logweights(const BlockStats& loo, const NodeIncidence& inc, const ZipPriors& priors,
                          std::span<double> out);

/// From-scratch version including log S_c; z[i] is ignored.
std::vector<double> zip_collapsed_label_logweights(int i, std::span<const int> z, const LatentEdges& latent,
                                                   std::span<const double> log_s, const ZipPriors& priors);

/// p_lm ~ Beta(a_p + x_lm, b_p + n_lm - x_lm), lambda_lm ~ Gamma(a_lambda + w_lm, b_lambda + n_lm).
ZipBlockParams zip_gibbs_block_params(const BlockStats& stats, const ZipPriors& priors, RngStream& rng);

/// P(x = 1 | A = 0) = p / (exp(-lambda) (1 - p) + p).
double zip_structural_zero_probability(double p, double lambda);

LatentEdges zip_sample_latent_edges(const AdjacencyMatrix& a, std::span<const int> z, const ZipBlockParams& params,
                                    RngStream& rng);

/// Block-pair zero-inflated Poisson kernel.
class ZipKernel {
 public:
  explicit ZipKernel(AdjacencyMatrix a, ZipPriors priors = {});

  /// P and Lambda at their prior means and one imputation of (X, W).
  void initialize(const PartitionState& state, RngStream& rng);

  void begin_label_scan(const PartitionState& state);
  void remove_node(int i, std::span<const int> z);
  void label_logweights(int i, std::span<const int> z, std::span<double> out) const;
  void add_node(int i, int c);
  void check_consistency(const PartitionState& state) const;

  void update_parameters(const PartitionState& state, RngStream& rng, SweepStats& stats);
  void permute(std::span<const int> perm);
  void refresh_empty(int K, int k, RngStream& rng);
  void adapt_proposals(int) {}

  const ZipBlockParams& params() const { return params_; }
  void set_params(ZipBlockParams params);
  const LatentEdges& latent() const { return latent_; }
  const AdjacencyMatrix& adjacency() const { return a_; }
  void set_data(AdjacencyMatrix a, LatentEdges latent);
  const ZipPriors& priors() const { return priors_; }

 private:
  AdjacencyMatrix a_;
  ZipPriors priors_;
  ZipBlockParams params_;
  LatentEdges latent_;
  IncrementalBlockStats stats_;
};

}  // namespace blocksampler

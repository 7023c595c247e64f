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

/// p ~ Beta(a_p, b_p), psi ~ Beta(a_psi, b_psi), r ~ Gamma(a_r, b_r) (rate).
struct ZinbPriors {
  double a_p = 1.0;
  double b_p = 1.0;
  double a_psi = 1.0;
  double b_psi = 1.0;
  double a_r = 1.0;
  double b_r = 1.0;

  void validate() const;
};

struct ZinbBlockParams {
  BlockTensor p;
  BlockTensor psi;
  BlockTensor r;

  int blocks() const { return p.blocks(); }
  ZinbBlockParams permuted(std::span<const int> perm) const;
};

/// (value, multiplicity) pairs of positive latent weights.
using WeightHistogram = std::vector<std::pair<Count, Count>>;
WeightHistogram make_histogram(std::vector<Count> values);

/// Log-likelihood of each label for node i with p and psi integrated out,
/// given the statistics `loo` of the other nodes, the node's incidence and
/// its positive latent weights grouped by the other endpoint's label.
void zinb_label_logweights(const BlockStats& loo, const NodeIncidence& inc, std::span<const WeightHistogram> node_hist,
                           const BlockTensor& r, const ZinbPriors& priors, std::span<double> out);

/// From-scratch label log-probabilities (unnormalised, including log S_c)
/// for node i; z[i] is ignored.
std::vector<double> collapsed_label_logweights(int i, std::span<const int> z, const LatentEdges& latent,
                                               const BlockTensor& r, std::span<const double> log_s,
                                               const ZinbPriors& priors);

/// Conjugate draws p_lm | X ~ Beta and psi_lm | W, r ~ Beta for every block pair.
std::pair<BlockTensor, BlockTensor> gibbs_block_params(const BlockStats& stats, const BlockTensor& r,
                                                       const ZinbPriors& priors, RngStream& rng);

struct DispersionUpdate {
  double r = 1.0;
  bool accepted = false;
};

/// Log-normal random-walk MH for one block's dispersion. `hist` holds the
/// positive latent weights of the block and n_pairs its pair count.
DispersionUpdate mh_update_dispersion(double r, const WeightHistogram& hist, Count n_pairs, double psi,
                                      const ZinbPriors& priors, double sd, RngStream& rng);

/// P(x = 1 | A = 0) = p / (psi^r (1 - p) + p).
double structural_zero_probability(double p, double psi, double r);

/// Imputes (X, W) given A: observed positives have x = 0, w = A; zeros are
/// structural with the probability above and then w ~ NB(psi, r).
LatentEdges sample_latent_edges(const AdjacencyMatrix& a, std::span<const int> z, const ZinbBlockParams& params,
                                RngStream& rng);

/// Positive latent weights of each block pair (l <= m), indexed l * K + m.
std::vector<WeightHistogram> block_weight_histograms(const CountMatrix& w, std::span<const int> z, int K);

/// Block-pair ZINB kernel for the mixture sampler.
class ZinbKernel {
 public:
  explicit ZinbKernel(AdjacencyMatrix a, ZinbPriors priors = {}, double r_proposal_sd = 0.2);

  /// P and Psi at their prior means, r = 1 and one imputation of (X, W).
  void initialize(const PartitionState& state, RngStream& rng);

  void begin_label_scan(const PartitionState& state);
  void remove_node(int i, std::span<const int> z);
  void label_logweights(int i, std::span<const int> z, std::span<double> out) const;
  void add_node(int i, int c);
  void check_consistency(const PartitionState& state) const;

  /// Block parameters, dispersions, then latent (X, W).
  void update_parameters(const PartitionState& state, RngStream& rng, SweepStats& stats);
  void permute(std::span<const int> perm);
  /// Resizes to K components and redraws from the prior every pair that
  /// touches a label >= k.
  void refresh_empty(int K, int k, RngStream& rng);
  void adapt_proposals(int iteration);

  const ZinbBlockParams& params() const { return params_; }
  void set_params(ZinbBlockParams params);
  const LatentEdges& latent() const { return latent_; }
  const AdjacencyMatrix& adjacency() const { return a_; }
  void set_data(AdjacencyMatrix a, LatentEdges latent);
  const ZinbPriors& priors() const { return priors_; }

 private:
  AdjacencyMatrix a_;
  ZinbPriors priors_;
  double default_log_sd_;
  ZinbBlockParams params_;
  BlockTensor log_sd_;
  BlockTensor accepted_;  ///< 1 / 0 for the last proposal, -1 when the block had no pairs
  LatentEdges latent_;
  IncrementalBlockStats stats_;
  std::vector<WeightHistogram> node_hist_;
};

}  // namespace blocksampler

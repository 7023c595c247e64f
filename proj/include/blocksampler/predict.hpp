#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blocksampler/chain.hpp"
#include "blocksampler/config.hpp"
#include "blocksampler/network.hpp"

namespace blocksampler {

struct PredictiveScores {
  std::vector<double> prob_nonzero;     ///< posterior predictive P(A_ij > 0)
  std::vector<double> expected_weight;  ///< posterior predictive E[A_ij]
};

/// Averages over kept draws of the per-draw probability of a nonzero weight
/// and of the expected weight. `covariates` are the raw covariates and are
/// required for czinb chains.
PredictiveScores predictive_scores(const ChainStore& chain, const std::vector<std::pair<int, int>>& pairs,
                                   const CovariateTensor* covariates = nullptr);

/// Mann-Whitney area under the ROC curve; ties count one half.
double auc(std::span<const double> scores, std::span<const int> labels);
double rmse(std::span<const double> predicted, std::span<const double> truth);

/// Masked pairs (label 1) plus every unmasked pair with a zero weight in
/// the original network (label 0).
struct EvaluationSet {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> labels;
};
EvaluationSet evaluation_set(const AdjacencyMatrix& original, const MaskSet& mask);

struct ReplicationResult {
  int replication = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double auc = 0.0;
  double rmse = 0.0;
};

struct LinkpredReport {
  ModelKind model = ModelKind::zinb;
  std::vector<ReplicationResult> replications;
  double auc_mean = 0.0;
  double auc_sd = 0.0;
  double rmse_mean = 0.0;
  double rmse_sd = 0.0;
  int failed = 0;
};

/// Seed of replication `rep` derived from a master seed.
std::uint64_t replication_seed(std::uint64_t master, int rep);

/// Per replication: mask cfg.mask_fraction of the nonzero pairs, fit on the
/// training network, score the evaluation set and the masked weights.
/// Replications run on cfg.jobs threads; a replication whose fit throws is
/// marked failed and left out of the means.
LinkpredReport run_linkpred_experiment(const AdjacencyMatrix& a, const CovariateTensor* covariates, ModelKind model,
                                       int replications, const RunConfig& cfg);

void write_scores_csv(const std::filesystem::path& path, const std::vector<std::pair<int, int>>& pairs,
                      const PredictiveScores& scores);

}  // namespace blocksampler

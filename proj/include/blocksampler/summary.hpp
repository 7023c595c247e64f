#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blocksampler/chain.hpp"

namespace blocksampler {

/// Variation of information H(z1) + H(z2) - 2 I(z1, z2) in nats. Labels
/// may be any integers.
double vi_distance(std::span<const int> z1, std::span<const int> z2);

/// The sampled partition with the smallest average VI to all samples;
/// ties go to the earliest draw.
std::vector<int> minvi_point_estimate(const std::vector<std::vector<int>>& partitions);

/// Smallest eps such that at least a `level` fraction of the partitions lie
/// within VI eps of z_hat.
double credible_ball_radius(const std::vector<std::vector<int>>& partitions, std::span<const int> z_hat, double level);

struct ClusterSummary {
  std::vector<int> z_hat;
  int K_hat = 0;
  std::optional<double> vi_to_truth;
  double ball_radius = 0.0;
};

ClusterSummary summarize_partitions(const std::vector<std::vector<int>>& partitions, double level = 0.95,
                                    const std::vector<int>* truth = nullptr);

struct CoefficientSummary {
  std::vector<double> mean;
  std::vector<double> lower;  ///< 2.5% quantile
  std::vector<double> upper;  ///< 97.5% quantile
  int draws_used = 0;
};

/// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double prob);

/// Summary of beta_s (s = 1 or 2) for block pair (l, m) of z_hat. Draws
/// whose label sets for z_hat's blocks l and m coincide with z_hat's are
/// used when there are any; otherwise every draw, each block of z_hat
/// matched to the draw label with maximum overlap.
CoefficientSummary summarize_coefficients(const ChainStore& chain, std::span<const int> z_hat, int l, int m, int s);

}  // namespace blocksampler

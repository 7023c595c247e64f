#pragma once

#include <cstdint>

#include "blocksampler/chain.hpp"
#include "blocksampler/config.hpp"
#include "blocksampler/network.hpp"
#include "blocksampler/partition.hpp"
#include "blocksampler/rng.hpp"

namespace blocksampler {

struct FitSummary {
  double gamma_acceptance = 0.0;       ///< over kept iterations
  double dispersion_acceptance = 0.0;  ///< over kept iterations; 0 for zip
  int k_cap_hits = 0;                  ///< iterations whose K update reached k_max
};

struct FitResult {
  ChainStore chain;
  FitSummary summary;
};

/// Design used by the covariate links: optionally standardised, optionally
/// with a leading intercept column. The transform is recorded on the result.
CovariateTensor prepare_design(const CovariateTensor& raw, bool standardize, bool intercept);

/// Starting state: K = min(k_init, n, k_max) (or fixed_k) components,
/// uniformly random labels, gamma = 1 and weights S_m ~ Gamma(gamma/K + n_m, 1)
/// given those labels.
PartitionState initial_state(int n, const SamplerConfig& cfg, RngStream& rng);

/// Runs one chain of the configured model. `covariates` holds the raw
/// covariates and is required for czinb only. The chain's random stream is
/// RngStream(seed, chain).
FitResult fit_model(const AdjacencyMatrix& a, const CovariateTensor* covariates, const SamplerConfig& cfg,
                    std::uint64_t seed, int chain = 0);

}  // namespace blocksampler

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "blocksampler/distributions.hpp"
#include "blocksampler/dmfm.hpp"
#include "blocksampler/error.hpp"
#include "blocksampler/partition.hpp"
#include "blocksampler/rng.hpp"

namespace blocksampler {

struct SweepOptions {
  bool random_scan = false;
  /// Recompute block statistics after the label scan and compare with the
  /// incrementally maintained ones; throws NumericalError on mismatch.
  bool check_stats = false;
  double gamma_proposal_sd = 0.1;
};

struct SweepStats {
  bool gamma_accepted = false;
  bool k_cap_hit = false;
  int dispersion_proposed = 0;
  int dispersion_accepted = 0;
};

/// Uniform random permutation of 0..n-1.
inline std::vector<int> random_order(int n, RngStream& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = std::min(i, static_cast<int>(rng.uniform() * (i + 1)));
    std::swap(order[i], order[j]);
  }
  return order;
}

/// One pass of single-site label updates. The kernel supplies the
/// collapsed log-likelihood of each label; the weight log S_c is added here.
template <typename Kernel>
void update_labels(Kernel& kernel, PartitionState& state, const SweepOptions& opt, RngStream& rng) {
  const int n = state.nodes();
  const int K = state.K();
  std::vector<int> order;
  if (opt.random_scan) {
    order = random_order(n, rng);
  } else {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  kernel.begin_label_scan(state);
  std::vector<double> lw(K);
  for (int i : order) {
    kernel.remove_node(i, state.z);
    --state.counts[state.z[i]];
    kernel.label_logweights(i, state.z, lw);
    bool any_finite = false;
    for (int c = 0; c < K; ++c) {
      lw[c] += state.log_s[c];
      if (std::isnan(lw[c])) throw NumericalError("NaN label weight at node " + std::to_string(i));
      any_finite = any_finite || std::isfinite(lw[c]);
    }
    if (!any_finite) throw NumericalError("all label weights vanish at node " + std::to_string(i));
    const int c = static_cast<int>(sample_categorical_log(rng, lw));
    state.z[i] = c;
    ++state.counts[c];
    kernel.add_node(i, c);
  }
  if (opt.check_stats) kernel.check_consistency(state);
}

/// One full sweep: auxiliary u, labels, kernel parameters and latent
/// variables, canonical relabelling, concentration, K, weights, and prior
/// draws for the parameters of empty components.
template <typename Kernel>
SweepStats gibbs_sweep(Kernel& kernel, PartitionState& state, const DmfmConfig& cfg, const SweepOptions& opt,
                       RngStream& rng) {
  SweepStats out;
  state.u = sample_auxiliary_u(state.nodes(), state.log_s, rng);
  update_labels(kernel, state, opt, rng);
  kernel.update_parameters(state, rng, out);
  kernel.permute(relabel_occupied(state));

  const std::vector<int> occupied = state.occupied_counts();
  const ConcentrationUpdate conc =
      update_concentration(state.gamma, state.u, occupied, state.K(), opt.gamma_proposal_sd, rng);
  state.gamma = conc.gamma;
  out.gamma_accepted = conc.accepted;
  const ComponentCountDraw k_draw = sample_num_components(occupied, state.gamma, state.u, cfg, rng);
  out.k_cap_hit = k_draw.cap_hit;
  state.log_s = sample_unnormalized_weights(occupied, state.gamma, k_draw.K, state.u, rng);
  state.counts.resize(k_draw.K, 0);
  kernel.refresh_empty(k_draw.K, static_cast<int>(occupied.size()), rng);
  return out;
}

/// Robbins-Monro step on a log proposal scale towards acceptance `target`.
inline double adapt_log_scale(double log_sd, bool accepted, int iteration, double target = 0.44) {
  const double step = std::pow(iteration + 1.0, -0.6);
  return log_sd + step * ((accepted ? 1.0 : 0.0) - target);
}

}  // namespace blocksampler

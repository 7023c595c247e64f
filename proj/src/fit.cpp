#include "blocksampler/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blocksampler/czinb_kernel.hpp"
#include "blocksampler/distributions.hpp"
#include "blocksampler/error.hpp"
#include "blocksampler/sweep.hpp"
#include "blocksampler/zinb_kernel.hpp"
#include "blocksampler/zip_kernel.hpp"

namespace blocksampler {

namespace {

BlockTensor leading(const BlockTensor& t, int k) {
  std::vector<int> ids(k);
  std::iota(ids.begin(), ids.end(), 0);
  return t.permuted(ids);
}

void record_params(const ZinbKernel& kernel, int k, DrawRecord& d) {
  d.blocks.emplace("p", leading(kernel.params().p, k));
  d.blocks.emplace("psi", leading(kernel.params().psi, k));
  d.blocks.emplace("r", leading(kernel.params().r, k));
}

void record_params(const ZipKernel& kernel, int k, DrawRecord& d) {
  d.blocks.emplace("p", leading(kernel.params().p, k));
  d.blocks.emplace("lambda", leading(kernel.params().lambda, k));
}

void record_params(const CzinbKernel& kernel, int k, DrawRecord& d) {
  d.blocks.emplace("beta1", leading(kernel.params().beta1, k));
  d.blocks.emplace("beta2", leading(kernel.params().beta2, k));
  d.dispersion = kernel.params().r;
}

template <typename Kernel>
FitResult run_chain(Kernel& kernel, const SamplerConfig& cfg, RngStream& rng, ChainMetadata meta) {
  PartitionState state = initial_state(meta.n, cfg, rng);
  kernel.initialize(state, rng);
  SweepOptions opt;
  opt.random_scan = cfg.random_scan;
  opt.check_stats = cfg.check_stats;
  double log_gamma_sd = std::log(cfg.dmfm.gamma_proposal_sd);

  FitResult out;
  out.chain.meta = std::move(meta);
  out.chain.draws.reserve(cfg.kept());
  long gamma_acc = 0;
  long disp_acc = 0;
  long disp_prop = 0;
  for (int t = 0; t < cfg.iterations; ++t) {
    opt.gamma_proposal_sd = std::exp(log_gamma_sd);
    SweepStats sweep;
    try {
      sweep = gibbs_sweep(kernel, state, cfg.dmfm, opt, rng);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(t) + ": " + e.what());
    }
    out.summary.k_cap_hits += sweep.k_cap_hit ? 1 : 0;
    if (t < cfg.burn_in) {
      if (cfg.adapt) {
        log_gamma_sd = adapt_log_scale(log_gamma_sd, sweep.gamma_accepted, t);
        kernel.adapt_proposals(t);
      }
      continue;
    }
    if ((t - cfg.burn_in) % cfg.thin != 0) continue;
    DrawRecord d;
    d.iteration = t;
    d.z = state.z;
    d.K = state.K();
    d.k = state.occupied();
    d.gamma = state.gamma;
    record_params(kernel, d.k, d);
    d.gamma_accepted = sweep.gamma_accepted;
    d.dispersion_proposed = sweep.dispersion_proposed;
    d.dispersion_accepted = sweep.dispersion_accepted;
    d.k_cap_hit = sweep.k_cap_hit;
    gamma_acc += sweep.gamma_accepted ? 1 : 0;
    disp_acc += sweep.dispersion_accepted;
    disp_prop += sweep.dispersion_proposed;
    out.chain.draws.push_back(std::move(d));
  }
  const double kept = static_cast<double>(out.chain.draws.size());
  out.summary.gamma_acceptance = kept > 0 ? gamma_acc / kept : 0.0;
  out.summary.dispersion_acceptance = disp_prop > 0 ? static_cast<double>(disp_acc) / disp_prop : 0.0;
  return out;
}

}  // namespace

CovariateTensor prepare_design(const CovariateTensor& raw, bool standardize, bool intercept) {
  CovariateTensor base = standardize ? raw.standardized() : raw;
  return intercept ? base.with_intercept() : base;
}

PartitionState initial_state(int n, const SamplerConfig& cfg, RngStream& rng) {
  if (n < 1) throw InputError("network has no nodes");
  const int K = cfg.dmfm.fixed_k > 0 ? cfg.dmfm.fixed_k : std::min({cfg.k_init, n, cfg.dmfm.k_max});
  PartitionState state;
  state.z.resize(n);
  state.counts.assign(K, 0);
  for (int i = 0; i < n; ++i) {
    state.z[i] = std::min(K - 1, static_cast<int>(rng.uniform() * K));
    ++state.counts[state.z[i]];
  }
  state.gamma = 1.0;
  state.u = 1.0;
  state.log_s = sample_unnormalized_weights(state.counts, state.gamma, K, 0.0, rng);
  return state;
}

FitResult fit_model(const AdjacencyMatrix& a, const CovariateTensor* covariates, const SamplerConfig& cfg,
                    std::uint64_t seed, int chain) {
  cfg.validate();
  if (a.size() < 2) throw InputError("network needs at least two nodes");
  ChainMetadata meta;
  meta.model = cfg.model;
  meta.seed = seed;
  meta.chain = chain;
  meta.config_hash = cfg.hash();
  meta.n = a.size();
  meta.iterations = cfg.iterations;
  meta.burn_in = cfg.burn_in;
  meta.thin = cfg.thin;
  RngStream rng(seed, static_cast<std::uint64_t>(chain));

  switch (cfg.model) {
    case ModelKind::zinb: {
      ZinbKernel kernel(a, cfg.zinb, cfg.r_proposal_sd);
      return run_chain(kernel, cfg, rng, std::move(meta));
    }
    case ModelKind::zip: {
      ZipKernel kernel(a, cfg.zip);
      return run_chain(kernel, cfg, rng, std::move(meta));
    }
    case ModelKind::czinb: {
      if (covariates == nullptr) throw InputError("covariates required for the czinb model");
      if (covariates->nodes() != a.size()) {
        throw InputError("covariates cover " + std::to_string(covariates->nodes()) + " nodes, network has " +
                         std::to_string(a.size()));
      }
      CovariateTensor design = prepare_design(*covariates, cfg.standardize, cfg.intercept);
      meta.dim = design.dim();
      meta.transform = design.transform();
      CzinbPriors priors = CzinbPriors::isotropic(design.dim(), cfg.beta_prior_scale);
      priors.a_r = cfg.zinb.a_r;
      priors.b_r = cfg.zinb.b_r;
      CzinbKernel kernel(a, std::move(design), std::move(priors), cfg.r_proposal_sd);
      return run_chain(kernel, cfg, rng, std::move(meta));
    }
  }
  throw InputError("unknown model");
}

}  // namespace blocksampler

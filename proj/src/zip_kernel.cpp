#include "blocksampler/zip_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "blocksampler/distributions.hpp"
#include "blocksampler/error.hpp"

namespace blocksampler {

void ZipPriors::validate() const {
  if (!(a_p > 0 && b_p > 0 && a_lambda > 0 && b_lambda > 0)) throw InputError("ZIP prior hyperparameters must be positive");
}

ZipBlockParams ZipBlockParams::permuted(std::span<const int> perm) const {
  return {p.permuted(perm), lambda.permuted(perm)};
}

namespace {

double log_poisson_evidence(Count w, Count n, const ZipPriors& priors) {
  const double shape = priors.a_lambda + static_cast<double>(w);
  return log_gamma_fn(shape) - shape * std::log(priors.b_lambda + static_cast<double>(n));
}

}  // namespace

void zip_label_logweights(const BlockStats& loo, const NodeIncidence& inc, const ZipPriors& priors,
                          std::span<double> out) {
  const int K = loo.blocks();
  for (int c = 0; c < K; ++c) {
    double total = 0.0;
    for (int m = 0; m < K; ++m) {
      if (inc.count[m] == 0) continue;
      const Count n0 = loo.pairs(c, m);
      const Count n1 = n0 + inc.count[m];
      const Count x0 = loo.x(c, m);
      const Count x1 = x0 + inc.x[m];
      const Count w0 = loo.w(c, m);
      const Count w1 = w0 + inc.w[m];
      total += log_beta(x1 + priors.a_p, n1 - x1 + priors.b_p) - log_beta(x0 + priors.a_p, n0 - x0 + priors.b_p);
      total += log_poisson_evidence(w1, n1, priors) - log_poisson_evidence(w0, n0, priors);
    }
    out[c] = total;
  }
}

std::vector<double> zip_collapsed_label_logweights(int i, std::span<const int> z, const LatentEdges& latent,
                                                   std::span<const double> log_s, const ZipPriors& priors) {
  const int K = static_cast<int>(log_s.size());
  const BlockStats stats = block_sufficient_stats(latent.x, latent.w, z, K);
  const NodeIncidence inc = node_incidence(i, z, latent.x, latent.w, K);
  BlockStats loo = stats;
  inc.remove_from(loo, z[i]);
  std::vector<double> out(K);
  zip_label_logweights(loo, inc, priors, out);
  for (int c = 0; c < K; ++c) out[c] += log_s[c];
  return out;
}

ZipBlockParams zip_gibbs_block_params(const BlockStats& stats, const ZipPriors& priors, RngStream& rng) {
  const int K = stats.blocks();
  ZipBlockParams out{BlockTensor(K, 1), BlockTensor(K, 1)};
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) {
      const Count n = stats.pairs(l, m);
      const Count x = stats.x(l, m);
      out.p.set_scalar(l, m, sample_beta(rng, priors.a_p + x, priors.b_p + n - x));
      out.lambda.set_scalar(l, m, sample_gamma(rng, priors.a_lambda + stats.w(l, m), priors.b_lambda + n));
    }
  }
  return out;
}

double zip_structural_zero_probability(double p, double lambda) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return std::exp(std::log(p) - log_add_exp(-lambda + std::log1p(-p), std::log(p)));
}

LatentEdges zip_sample_latent_edges(const AdjacencyMatrix& a, std::span<const int> z, const ZipBlockParams& params,
                                    RngStream& rng) {
  const int n = a.size();
  LatentEdges out{FlagMatrix(n, 0), CountMatrix(n, 0)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Count aij = a(i, j);
      if (aij > 0) {
        out.w.set(i, j, aij);
        continue;
      }
      const double lambda = params.lambda.scalar(z[i], z[j]);
      if (sample_bernoulli(rng, zip_structural_zero_probability(params.p.scalar(z[i], z[j]), lambda))) {
        out.x.set(i, j, 1);
        out.w.set(i, j, sample_poisson(rng, lambda));
      }
    }
  }
  return out;
}

ZipKernel::ZipKernel(AdjacencyMatrix a, ZipPriors priors) : a_(std::move(a)), priors_(priors) { priors_.validate(); }

void ZipKernel::initialize(const PartitionState& state, RngStream& rng) {
  const int K = state.K();
  params_.p = BlockTensor(K, 1, priors_.a_p / (priors_.a_p + priors_.b_p));
  params_.lambda = BlockTensor(K, 1, priors_.a_lambda / priors_.b_lambda);
  latent_ = zip_sample_latent_edges(a_, state.z, params_, rng);
}

void ZipKernel::begin_label_scan(const PartitionState& state) { stats_.rebuild(latent_, state.z, state.K()); }

void ZipKernel::remove_node(int i, std::span<const int> z) { stats_.remove_node(i, z, latent_); }

void ZipKernel::label_logweights(int, std::span<const int>, std::span<double> out) const {
  zip_label_logweights(stats_.stats(), stats_.incidence(), priors_, out);
}

void ZipKernel::add_node(int, int c) { stats_.add_node(c); }

void ZipKernel::check_consistency(const PartitionState& state) const {
  if (!(block_sufficient_stats(latent_.x, latent_.w, state.z, state.K()) == stats_.stats())) {
    throw NumericalError("incremental block statistics diverged from a full recount");
  }
}

void ZipKernel::update_parameters(const PartitionState& state, RngStream& rng, SweepStats&) {
  params_ = zip_gibbs_block_params(stats_.stats(), priors_, rng);
  latent_ = zip_sample_latent_edges(a_, state.z, params_, rng);
}

void ZipKernel::permute(std::span<const int> perm) { params_ = params_.permuted(perm); }

void ZipKernel::refresh_empty(int K, int k, RngStream& rng) {
  params_.p.resize(K);
  params_.lambda.resize(K);
  for (int l = 0; l < K; ++l) {
    for (int m = std::max(l, k); m < K; ++m) {
      params_.p.set_scalar(l, m, sample_beta(rng, priors_.a_p, priors_.b_p));
      params_.lambda.set_scalar(l, m, sample_gamma(rng, priors_.a_lambda, priors_.b_lambda));
    }
  }
}

void ZipKernel::set_params(ZipBlockParams params) {
  if (params.lambda.blocks() != params.p.blocks()) throw InputError("ZIP parameter tensors differ in size");
  params_ = std::move(params);
}

void ZipKernel::set_data(AdjacencyMatrix a, LatentEdges latent) {
  if (latent.x.size() != a.size() || latent.w.size() != a.size()) throw InputError("latent edges do not match the network");
  a_ = std::move(a);
  latent_ = std::move(latent);
}

}  // namespace blocksampler

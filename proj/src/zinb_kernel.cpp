#include "blocksampler/zinb_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blocksampler/distributions.hpp"
#include "blocksampler/error.hpp"

namespace blocksampler {

void ZinbPriors::validate() const {
  if (!(a_p > 0 && b_p > 0 && a_psi > 0 && b_psi > 0 && a_r > 0 && b_r > 0)) {
    throw InputError("ZINB prior hyperparameters must be positive");
  }
}

ZinbBlockParams ZinbBlockParams::permuted(std::span<const int> perm) const {
  return {p.permuted(perm), psi.permuted(perm), r.permuted(perm)};
}

WeightHistogram make_histogram(std::vector<Count> values) {
  std::sort(values.begin(), values.end());
  WeightHistogram out;
  for (Count v : values) {
    if (!out.empty() && out.back().first == v) {
      ++out.back().second;
    } else {
      out.emplace_back(v, 1);
    }
  }
  return out;
}

namespace {

double log_rising_sum(const WeightHistogram& hist, double r) {
  if (hist.empty()) return 0.0;
  const double lg_r = log_gamma_fn(r);
  double total = 0.0;
  for (const auto& [w, mult] : hist) total += static_cast<double>(mult) * (log_gamma_fn(static_cast<double>(w) + r) - lg_r);
  return total;
}

std::vector<WeightHistogram> node_histograms(int i, std::span<const int> z, const CountMatrix& w, int K) {
  std::vector<std::vector<Count>> raw(K);
  const auto wi = w.row(i);
  for (int j = 0; j < static_cast<int>(z.size()); ++j) {
    if (j != i && wi[j] > 0) raw[z[j]].push_back(wi[j]);
  }
  std::vector<WeightHistogram> out(K);
  for (int m = 0; m < K; ++m) out[m] = make_histogram(std::move(raw[m]));
  return out;
}

}  // namespace

void zinb_label_logweights(const BlockStats& loo, const NodeIncidence& inc, std::span<const WeightHistogram> node_hist,
                           const BlockTensor& r, const ZinbPriors& priors, std::span<double> out) {
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
      const double rr = r.scalar(c, m);
      total += log_beta(x1 + priors.a_p, n1 - x1 + priors.b_p) - log_beta(x0 + priors.a_p, n0 - x0 + priors.b_p);
      total += log_beta(rr * n1 + priors.a_psi, w1 + priors.b_psi) - log_beta(rr * n0 + priors.a_psi, w0 + priors.b_psi);
      total += log_rising_sum(node_hist[m], rr);
    }
    out[c] = total;
  }
}

std::vector<double> collapsed_label_logweights(int i, std::span<const int> z, const LatentEdges& latent,
                                               const BlockTensor& r, std::span<const double> log_s,
                                               const ZinbPriors& priors) {
  const int K = r.blocks();
  if (static_cast<int>(log_s.size()) != K) throw InputError("log_s length differs from the number of blocks");
  const BlockStats stats = block_sufficient_stats(latent.x, latent.w, z, K);
  const NodeIncidence inc = node_incidence(i, z, latent.x, latent.w, K);
  BlockStats loo = stats;
  inc.remove_from(loo, z[i]);
  const auto hist = node_histograms(i, z, latent.w, K);
  std::vector<double> out(K);
  zinb_label_logweights(loo, inc, hist, r, priors, out);
  for (int c = 0; c < K; ++c) out[c] += log_s[c];
  return out;
}

std::pair<BlockTensor, BlockTensor> gibbs_block_params(const BlockStats& stats, const BlockTensor& r,
                                                       const ZinbPriors& priors, RngStream& rng) {
  const int K = stats.blocks();
  BlockTensor p(K, 1), psi(K, 1);
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) {
      const Count n = stats.pairs(l, m);
      const Count x = stats.x(l, m);
      p.set_scalar(l, m, sample_beta(rng, priors.a_p + x, priors.b_p + n - x));
      psi.set_scalar(l, m, sample_beta(rng, priors.a_psi + r.scalar(l, m) * n, priors.b_psi + stats.w(l, m)));
    }
  }
  return {std::move(p), std::move(psi)};
}

DispersionUpdate mh_update_dispersion(double r, const WeightHistogram& hist, Count n_pairs, double psi,
                                      const ZinbPriors& priors, double sd, RngStream& rng) {
  const double proposal = propose_log_normal(rng, r, sd);
  const double log_psi = std::log(psi);
  auto target = [&](double v) {
    return log_rising_sum(hist, v) + v * static_cast<double>(n_pairs) * log_psi + gamma_log_pdf(v, priors.a_r, priors.b_r) +
           std::log(v);
  };
  const double log_ratio = target(proposal) - target(r);
  if (std::log(rng.uniform()) < log_ratio) return {proposal, true};
  return {r, false};
}

double structural_zero_probability(double p, double psi, double r) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double log_nb_zero = r * std::log(psi) + std::log1p(-p);
  return std::exp(std::log(p) - log_add_exp(log_nb_zero, std::log(p)));
}

LatentEdges sample_latent_edges(const AdjacencyMatrix& a, std::span<const int> z, const ZinbBlockParams& params,
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
      const int l = z[i];
      const int m = z[j];
      const double psi = params.psi.scalar(l, m);
      const double r = params.r.scalar(l, m);
      if (sample_bernoulli(rng, structural_zero_probability(params.p.scalar(l, m), psi, r))) {
        out.x.set(i, j, 1);
        out.w.set(i, j, sample_negative_binomial(rng, psi, r));
      }
    }
  }
  return out;
}

std::vector<WeightHistogram> block_weight_histograms(const CountMatrix& w, std::span<const int> z, int K) {
  std::vector<std::vector<Count>> raw(static_cast<std::size_t>(K) * K);
  const int n = w.size();
  for (int i = 0; i < n; ++i) {
    const auto wi = w.row(i);
    for (int j = i + 1; j < n; ++j) {
      if (wi[j] <= 0) continue;
      const int l = std::min(z[i], z[j]);
      const int m = std::max(z[i], z[j]);
      raw[static_cast<std::size_t>(l) * K + m].push_back(wi[j]);
    }
  }
  std::vector<WeightHistogram> out(raw.size());
  for (std::size_t b = 0; b < raw.size(); ++b) out[b] = make_histogram(std::move(raw[b]));
  return out;
}

ZinbKernel::ZinbKernel(AdjacencyMatrix a, ZinbPriors priors, double r_proposal_sd)
    : a_(std::move(a)), priors_(priors), default_log_sd_(std::log(r_proposal_sd)) {
  priors_.validate();
  if (!(r_proposal_sd > 0.0)) throw InputError("r proposal sd must be positive");
}

void ZinbKernel::initialize(const PartitionState& state, RngStream& rng) {
  const int K = state.K();
  params_.p = BlockTensor(K, 1, priors_.a_p / (priors_.a_p + priors_.b_p));
  params_.psi = BlockTensor(K, 1, priors_.a_psi / (priors_.a_psi + priors_.b_psi));
  params_.r = BlockTensor(K, 1, 1.0);
  log_sd_ = BlockTensor(K, 1, default_log_sd_);
  accepted_ = BlockTensor(K, 1, -1.0);
  latent_ = sample_latent_edges(a_, state.z, params_, rng);
}

void ZinbKernel::begin_label_scan(const PartitionState& state) { stats_.rebuild(latent_, state.z, state.K()); }

void ZinbKernel::remove_node(int i, std::span<const int> z) {
  stats_.remove_node(i, z, latent_);
  node_hist_ = node_histograms(i, z, latent_.w, stats_.stats().blocks());
}

void ZinbKernel::label_logweights(int, std::span<const int>, std::span<double> out) const {
  zinb_label_logweights(stats_.stats(), stats_.incidence(), node_hist_, params_.r, priors_, out);
}

void ZinbKernel::add_node(int, int c) { stats_.add_node(c); }

void ZinbKernel::check_consistency(const PartitionState& state) const {
  if (!(block_sufficient_stats(latent_.x, latent_.w, state.z, state.K()) == stats_.stats())) {
    throw NumericalError("incremental block statistics diverged from a full recount");
  }
}

void ZinbKernel::update_parameters(const PartitionState& state, RngStream& rng, SweepStats& sweep) {
  const int K = state.K();
  const BlockStats& stats = stats_.stats();
  auto [p, psi] = gibbs_block_params(stats, params_.r, priors_, rng);
  params_.p = std::move(p);
  params_.psi = std::move(psi);

  const auto hist = block_weight_histograms(latent_.w, state.z, K);
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) {
      const Count n = stats.pairs(l, m);
      const DispersionUpdate upd = mh_update_dispersion(params_.r.scalar(l, m), hist[static_cast<std::size_t>(l) * K + m], n,
                                                        params_.psi.scalar(l, m), priors_,
                                                        std::exp(log_sd_.scalar(l, m)), rng);
      params_.r.set_scalar(l, m, upd.r);
      if (n > 0) {
        ++sweep.dispersion_proposed;
        sweep.dispersion_accepted += upd.accepted ? 1 : 0;
        accepted_.set_scalar(l, m, upd.accepted ? 1.0 : 0.0);
      } else {
        accepted_.set_scalar(l, m, -1.0);
      }
    }
  }
  latent_ = sample_latent_edges(a_, state.z, params_, rng);
}

void ZinbKernel::permute(std::span<const int> perm) {
  params_ = params_.permuted(perm);
  log_sd_ = log_sd_.permuted(perm);
  accepted_ = accepted_.permuted(perm);
}

void ZinbKernel::refresh_empty(int K, int k, RngStream& rng) {
  params_.p.resize(K);
  params_.psi.resize(K);
  params_.r.resize(K);
  log_sd_.resize(K, default_log_sd_);
  accepted_.resize(K, -1.0);
  for (int l = 0; l < K; ++l) {
    for (int m = std::max(l, k); m < K; ++m) {
      params_.p.set_scalar(l, m, sample_beta(rng, priors_.a_p, priors_.b_p));
      params_.psi.set_scalar(l, m, sample_beta(rng, priors_.a_psi, priors_.b_psi));
      params_.r.set_scalar(l, m, sample_gamma(rng, priors_.a_r, priors_.b_r));
      log_sd_.set_scalar(l, m, default_log_sd_);
      accepted_.set_scalar(l, m, -1.0);
    }
  }
}

void ZinbKernel::adapt_proposals(int iteration) {
  const int K = log_sd_.blocks();
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) {
      const double acc = accepted_.scalar(l, m);
      if (acc < 0.0) continue;
      log_sd_.set_scalar(l, m, adapt_log_scale(log_sd_.scalar(l, m), acc > 0.5, iteration));
    }
  }
}

void ZinbKernel::set_params(ZinbBlockParams params) {
  params_ = std::move(params);
  const int K = params_.blocks();
  if (params_.psi.blocks() != K || params_.r.blocks() != K) throw InputError("ZINB parameter tensors differ in size");
  log_sd_ = BlockTensor(K, 1, default_log_sd_);
  accepted_ = BlockTensor(K, 1, -1.0);
}

void ZinbKernel::set_data(AdjacencyMatrix a, LatentEdges latent) {
  if (latent.x.size() != a.size() || latent.w.size() != a.size()) throw InputError("latent edges do not match the network");
  a_ = std::move(a);
  latent_ = std::move(latent);
}

}  // namespace blocksampler

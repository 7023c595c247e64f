#include "blocksampler/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "blocksampler/distributions.hpp"
#include "blocksampler/error.hpp"
#include "blocksampler/fit.hpp"
#include "blocksampler/parallel.hpp"

namespace blocksampler {

namespace {

struct PairPrediction {
  double prob_nonzero;
  double expected;
};

PairPrediction zinb_prediction(double p, double psi, double r) {
  return {(1.0 - p) * -std::expm1(r * std::log(psi)), (1.0 - p) * r * (1.0 - psi) / psi};
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

PredictiveScores predictive_scores(const ChainStore& chain, const std::vector<std::pair<int, int>>& pairs,
                                   const CovariateTensor* covariates) {
  const int n = chain.meta.n;
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw InputError("pair (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ") is out of range");
    }
  }
  if (chain.draws.empty()) throw InputError("chain has no kept draws");
  CovariateTensor design;
  if (chain.meta.model == ModelKind::czinb) {
    if (covariates == nullptr) throw InputError("covariates required to score a czinb chain");
    if (covariates->nodes() != n) throw InputError("covariates do not match the chain's node count");
    design = covariates->apply(chain.meta.transform);
    if (design.dim() != chain.meta.dim) throw InputError("covariate dimension differs from the fitted design");
  }

  PredictiveScores out;
  out.prob_nonzero.assign(pairs.size(), 0.0);
  out.expected_weight.assign(pairs.size(), 0.0);
  for (const auto& d : chain.draws) {
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const int l = d.z[pairs[q].first];
      const int m = d.z[pairs[q].second];
      PairPrediction pr{};
      switch (chain.meta.model) {
        case ModelKind::zinb:
          pr = zinb_prediction(d.block("p").scalar(l, m), d.block("psi").scalar(l, m), d.block("r").scalar(l, m));
          break;
        case ModelKind::zip: {
          const double p = d.block("p").scalar(l, m);
          const double lambda = d.block("lambda").scalar(l, m);
          pr = {(1.0 - p) * -std::expm1(-lambda), (1.0 - p) * lambda};
          break;
        }
        case ModelKind::czinb: {
          const auto y = design.at(pairs[q].first, pairs[q].second);
          const auto b1 = d.block("beta1").at(l, m);
          const auto b2 = d.block("beta2").at(l, m);
          const double eta1 = std::inner_product(y.begin(), y.end(), b1.begin(), 0.0);
          const double eta2 = std::inner_product(y.begin(), y.end(), b2.begin(), 0.0);
          pr = zinb_prediction(logistic(eta2), logistic(eta1), d.dispersion);
          break;
        }
      }
      out.prob_nonzero[q] += pr.prob_nonzero;
      out.expected_weight[q] += pr.expected;
    }
  }
  const double T = static_cast<double>(chain.draws.size());
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    out.prob_nonzero[q] /= T;
    out.expected_weight[q] /= T;
  }
  return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InputError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]] != 0) {
        rank_sum += mid_rank;
        pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double neg = static_cast<double>(scores.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw InputError("AUC needs both positive and negative labels");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double rmse(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw InputError("rmse inputs differ in length");
  if (predicted.empty()) throw InputError("rmse of an empty set");
  double ss = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) ss += (predicted[k] - truth[k]) * (predicted[k] - truth[k]);
  return std::sqrt(ss / static_cast<double>(predicted.size()));
}

EvaluationSet evaluation_set(const AdjacencyMatrix& original, const MaskSet& mask) {
  if (mask.empty()) throw InputError("empty mask");
  EvaluationSet out;
  const int n = original.size();
  SymmetricMatrix<std::uint8_t> masked(n, 0);
  for (const auto& [i, j] : mask.pairs) masked.set(i, j, 1);
  for (const auto& pr : mask.pairs) {
    out.pairs.push_back(pr);
    out.labels.push_back(1);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!masked(i, j) && original(i, j) == 0) {
        out.pairs.emplace_back(i, j);
        out.labels.push_back(0);
      }
    }
  }
  return out;
}

std::uint64_t replication_seed(std::uint64_t master, int rep) {
  std::uint64_t x = master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(rep) + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

LinkpredReport run_linkpred_experiment(const AdjacencyMatrix& a, const CovariateTensor* covariates, ModelKind model,
                                       int replications, const RunConfig& cfg) {
  if (replications < 1) throw InputError("replications must be at least 1");
  if (!(cfg.mask_fraction > 0.0)) throw InputError("empty mask");
  if (model == ModelKind::czinb && covariates == nullptr) throw InputError("covariates required for the czinb model");
  SamplerConfig sampler = cfg.sampler;
  sampler.model = model;
  sampler.validate();

  LinkpredReport report;
  report.model = model;
  report.replications.resize(replications);
  parallel_for(static_cast<std::size_t>(replications), cfg.jobs, [&](std::size_t rep) {
    ReplicationResult& res = report.replications[rep];
    res.replication = static_cast<int>(rep);
    res.seed = replication_seed(cfg.seed, static_cast<int>(rep));
    const auto [train, mask] = mask_nonzero(a, cfg.mask_fraction, res.seed);
    if (mask.empty()) throw InputError("empty mask");
    try {
      const FitResult fit = fit_model(train, covariates, sampler, res.seed, 0);
      const EvaluationSet eval = evaluation_set(a, mask);
      const PredictiveScores scores = predictive_scores(fit.chain, eval.pairs, covariates);
      res.auc = auc(scores.prob_nonzero, eval.labels);
      const std::vector<double> predicted(scores.expected_weight.begin(),
                                          scores.expected_weight.begin() + static_cast<std::ptrdiff_t>(mask.size()));
      std::vector<double> truth(mask.original.begin(), mask.original.end());
      res.rmse = rmse(predicted, truth);
    } catch (const NumericalError& e) {
      res.failed = true;
      res.error = e.what();
    }
  });

  std::vector<double> aucs, rmses;
  for (const auto& r : report.replications) {
    if (r.failed) {
      ++report.failed;
      continue;
    }
    aucs.push_back(r.auc);
    rmses.push_back(r.rmse);
  }
  if (aucs.empty()) throw NumericalError("every replication failed");
  report.auc_mean = mean_of(aucs);
  report.auc_sd = sd_of(aucs);
  report.rmse_mean = mean_of(rmses);
  report.rmse_sd = sd_of(rmses);
  return report;
}

void write_scores_csv(const std::filesystem::path& path, const std::vector<std::pair<int, int>>& pairs,
                      const PredictiveScores& scores) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  out << "i,j,prob_nonzero,expected_weight\n";
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    out << pairs[q].first + 1 << ',' << pairs[q].second + 1 << ',' << scores.prob_nonzero[q] << ','
        << scores.expected_weight[q] << '\n';
  }
}

}  // namespace blocksampler

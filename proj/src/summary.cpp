#include "blocksampler/summary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "blocksampler/error.hpp"
#include "blocksampler/partition.hpp"

namespace blocksampler {

namespace {

int label_count(std::span<const int> z) {
  int k = 0;
  for (int v : z) k = std::max(k, v + 1);
  return k;
}

// VI between two partitions already labelled 0..k-1.
double vi_canonical(std::span<const int> a, std::span<const int> b, int ka, int kb, std::vector<int>& table) {
  table.assign(static_cast<std::size_t>(ka) * kb, 0);
  std::vector<int> na(ka, 0), nb(kb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++table[static_cast<std::size_t>(a[i]) * kb + b[i]];
    ++na[a[i]];
    ++nb[b[i]];
  }
  const double n = static_cast<double>(a.size());
  double vi = 0.0;
  for (int x = 0; x < ka; ++x) {
    for (int y = 0; y < kb; ++y) {
      const int c = table[static_cast<std::size_t>(x) * kb + y];
      if (c == 0) continue;
      vi += c * (std::log(static_cast<double>(na[x]) / c) + std::log(static_cast<double>(nb[y]) / c));
    }
  }
  return std::max(0.0, vi / n);
}

}  // namespace

double vi_distance(std::span<const int> z1, std::span<const int> z2) {
  if (z1.size() != z2.size()) {
    throw InputError("partitions have different lengths (" + std::to_string(z1.size()) + " and " +
                     std::to_string(z2.size()) + ")");
  }
  if (z1.empty()) return 0.0;
  const auto a = canonical_labels(z1);
  const auto b = canonical_labels(z2);
  std::vector<int> table;
  return vi_canonical(a, b, label_count(a), label_count(b), table);
}

std::vector<int> minvi_point_estimate(const std::vector<std::vector<int>>& partitions) {
  if (partitions.empty()) throw InputError("cannot summarise an empty chain");
  std::map<std::vector<int>, std::size_t> index;
  std::vector<std::vector<int>> unique;
  std::vector<std::size_t> first;
  std::vector<double> weight;
  for (std::size_t t = 0; t < partitions.size(); ++t) {
    if (partitions[t].size() != partitions.front().size()) throw InputError("partitions have different lengths");
    auto canon = canonical_labels(partitions[t]);
    const auto [it, inserted] = index.emplace(canon, unique.size());
    if (inserted) {
      unique.push_back(std::move(canon));
      first.push_back(t);
      weight.push_back(1.0);
    } else {
      weight[it->second] += 1.0;
    }
  }
  const std::size_t U = unique.size();
  std::vector<int> k(U);
  for (std::size_t u = 0; u < U; ++u) k[u] = label_count(unique[u]);
  std::vector<double> loss(U, 0.0);
  std::vector<int> table;
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t v = u + 1; v < U; ++v) {
      const double d = vi_canonical(unique[u], unique[v], k[u], k[v], table);
      loss[u] += weight[v] * d;
      loss[v] += weight[u] * d;
    }
  }
  std::size_t best = 0;
  for (std::size_t u = 1; u < U; ++u) {
    if (loss[u] < loss[best] - 1e-12 * std::max(1.0, loss[best])) best = u;
  }
  return partitions[first[best]];
}

double credible_ball_radius(const std::vector<std::vector<int>>& partitions, std::span<const int> z_hat, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("credible level must lie in (0, 1)");
  if (partitions.empty()) throw InputError("cannot summarise an empty chain");
  std::vector<double> d;
  d.reserve(partitions.size());
  for (const auto& z : partitions) d.push_back(vi_distance(z_hat, z));
  std::sort(d.begin(), d.end());
  const double need = std::ceil(level * static_cast<double>(d.size()) - 1e-9);
  const std::size_t idx = static_cast<std::size_t>(std::max(1.0, need)) - 1;
  return d[std::min(idx, d.size() - 1)];
}

ClusterSummary summarize_partitions(const std::vector<std::vector<int>>& partitions, double level,
                                    const std::vector<int>* truth) {
  ClusterSummary out;
  out.z_hat = canonical_labels(minvi_point_estimate(partitions));
  out.K_hat = label_count(out.z_hat);
  out.ball_radius = credible_ball_radius(partitions, out.z_hat, level);
  if (truth != nullptr) out.vi_to_truth = vi_distance(out.z_hat, *truth);
  return out;
}

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

CoefficientSummary summarize_coefficients(const ChainStore& chain, std::span<const int> z_hat, int l, int m, int s) {
  if (chain.meta.model != ModelKind::czinb) throw InputError("coefficient summaries need a czinb chain");
  if (s != 1 && s != 2) throw InputError("coefficient set must be 1 or 2");
  if (chain.draws.empty()) throw InputError("cannot summarise an empty chain");
  const auto zh = canonical_labels(z_hat);
  const int K_hat = label_count(zh);
  if (l < 0 || m < 0 || l >= K_hat || m >= K_hat) {
    throw InputError("block pair (" + std::to_string(l + 1) + ", " + std::to_string(m + 1) + ") never occupied");
  }
  const std::string name = s == 1 ? "beta1" : "beta2";
  const int n = static_cast<int>(zh.size());

  struct Match {
    int bl;
    int bm;
    bool exact;
  };
  std::vector<Match> matches;
  bool any_exact = false;
  for (const auto& d : chain.draws) {
    if (static_cast<int>(d.z.size()) != n) throw InputError("draw length differs from z_hat");
    std::vector<std::vector<int>> overlap(K_hat, std::vector<int>(d.k, 0));
    std::vector<int> size_draw(d.k, 0);
    std::vector<int> size_hat(K_hat, 0);
    for (int i = 0; i < n; ++i) {
      ++overlap[zh[i]][d.z[i]];
      ++size_draw[d.z[i]];
      ++size_hat[zh[i]];
    }
    auto best = [&](int a) {
      return static_cast<int>(std::max_element(overlap[a].begin(), overlap[a].end()) - overlap[a].begin());
    };
    const int bl = best(l);
    const int bm = best(m);
    const bool exact = overlap[l][bl] == size_hat[l] && size_draw[bl] == size_hat[l] && overlap[m][bm] == size_hat[m] &&
                       size_draw[bm] == size_hat[m];
    any_exact = any_exact || exact;
    matches.push_back({bl, bm, exact});
  }

  const int dim = chain.draws.front().block(name).dim();
  std::vector<std::vector<double>> values(dim);
  CoefficientSummary out;
  for (std::size_t t = 0; t < chain.draws.size(); ++t) {
    if (any_exact && !matches[t].exact) continue;
    const auto beta = chain.draws[t].block(name).at(matches[t].bl, matches[t].bm);
    for (int c = 0; c < dim; ++c) values[c].push_back(beta[c]);
    ++out.draws_used;
  }
  for (int c = 0; c < dim; ++c) {
    double sum = 0.0;
    for (double v : values[c]) sum += v;
    out.mean.push_back(sum / static_cast<double>(values[c].size()));
    out.lower.push_back(empirical_quantile(values[c], 0.025));
    out.upper.push_back(empirical_quantile(values[c], 0.975));
  }
  return out;
}

}  // namespace blocksampler

#include "blocksampler/partition.hpp"

#include <algorithm>
#include <numeric>

#include "blocksampler/error.hpp"

namespace blocksampler {

int PartitionState::occupied() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
}

std::vector<int> PartitionState::occupied_counts() const {
  std::vector<int> out;
  for (int c : counts) {
    if (c > 0) out.push_back(c);
  }
  return out;
}

void PartitionState::check() const {
  if (static_cast<int>(counts.size()) != K()) throw NumericalError("partition counts length differs from K");
  std::vector<int> tally(K(), 0);
  for (int label : z) {
    if (label < 0 || label >= K()) throw NumericalError("label outside 0..K-1");
    ++tally[label];
  }
  if (tally != counts) throw NumericalError("partition counts out of sync with labels");
}

void BlockStats::add_pair(int l, int m, Count x, Count w) {
  x_[idx(l, m)] += x;
  w_[idx(l, m)] += w;
  if (l != m) {
    x_[idx(m, l)] += x;
    w_[idx(m, l)] += w;
  }
}

void NodeIncidence::remove_from(BlockStats& stats, int label) const {
  for (int m = 0; m < stats.blocks(); ++m) {
    if (count[m] == 0) continue;
    stats.add_pair(label, m, -x[m], -w[m]);
  }
  stats.counts_[label] -= 1;
}

void NodeIncidence::add_to(BlockStats& stats, int label) const {
  for (int m = 0; m < stats.blocks(); ++m) {
    if (count[m] == 0) continue;
    stats.add_pair(label, m, x[m], w[m]);
  }
  stats.counts_[label] += 1;
}

BlockStats block_sufficient_stats(const FlagMatrix& x, const CountMatrix& w, std::span<const int> z, int K) {
  const int n = static_cast<int>(z.size());
  if (x.size() != n || w.size() != n) throw InputError("latent matrices do not match the label vector");
  BlockStats stats(K);
  for (int i = 0; i < n; ++i) {
    if (z[i] < 0 || z[i] >= K) throw InputError("label outside 0..K-1");
    stats.set_size(z[i], stats.size(z[i]) + 1);
  }
  for (int i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    const auto wi = w.row(i);
    for (int j = i + 1; j < n; ++j) {
      if (xi[j] != 0 || wi[j] != 0) stats.add_pair(z[i], z[j], xi[j], wi[j]);
    }
  }
  return stats;
}

NodeIncidence node_incidence(int i, std::span<const int> z, const FlagMatrix& x, const CountMatrix& w, int K) {
  NodeIncidence inc{std::vector<Count>(K, 0), std::vector<Count>(K, 0), std::vector<Count>(K, 0)};
  const auto xi = x.row(i);
  const auto wi = w.row(i);
  const int n = static_cast<int>(z.size());
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const int m = z[j];
    inc.count[m] += 1;
    inc.x[m] += xi[j];
    inc.w[m] += wi[j];
  }
  return inc;
}

BlockStats leave_one_out(const BlockStats& stats, int i, std::span<const int> z, const FlagMatrix& x,
                         const CountMatrix& w) {
  if (i < 0 || i >= static_cast<int>(z.size())) throw InputError("node index out of range");
  BlockStats out = stats;
  node_incidence(i, z, x, w, stats.blocks()).remove_from(out, z[i]);
  return out;
}

void IncrementalBlockStats::rebuild(const LatentEdges& latent, std::span<const int> z, int K) {
  stats_ = block_sufficient_stats(latent.x, latent.w, z, K);
}

const NodeIncidence& IncrementalBlockStats::remove_node(int i, std::span<const int> z, const LatentEdges& latent) {
  incidence_ = node_incidence(i, z, latent.x, latent.w, stats_.blocks());
  incidence_.remove_from(stats_, z[i]);
  return incidence_;
}

void IncrementalBlockStats::add_node(int c) { incidence_.add_to(stats_, c); }

std::vector<int> relabel_occupied(PartitionState& state) {
  const int K = state.K();
  std::vector<int> perm;
  std::vector<int> new_label(K, -1);
  for (int label : state.z) {
    if (new_label[label] < 0) {
      new_label[label] = static_cast<int>(perm.size());
      perm.push_back(label);
    }
  }
  for (int old = 0; old < K; ++old) {
    if (new_label[old] < 0) {
      new_label[old] = static_cast<int>(perm.size());
      perm.push_back(old);
    }
  }
  for (int& label : state.z) label = new_label[label];
  std::vector<int> counts(K);
  std::vector<double> log_s(K);
  for (int a = 0; a < K; ++a) {
    counts[a] = state.counts[perm[a]];
    log_s[a] = state.log_s[perm[a]];
  }
  state.counts = std::move(counts);
  state.log_s = std::move(log_s);
  return perm;
}

std::vector<int> canonical_labels(std::span<const int> z) {
  std::vector<int> out(z.size());
  std::vector<std::pair<int, int>> seen;  // (old, new), tiny
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == z[i]; });
    if (it == seen.end()) {
      seen.emplace_back(z[i], static_cast<int>(seen.size()));
      out[i] = static_cast<int>(seen.size()) - 1;
    } else {
      out[i] = it->second;
    }
  }
  return out;
}

}  // namespace blocksampler

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "blocksampler/matrix.hpp"
#include "blocksampler/network.hpp"

namespace blocksampler {

using FlagMatrix = SymmetricMatrix<std::uint8_t>;
using CountMatrix = SymmetricMatrix<Count>;

/// Mixture-level sampler state: labels plus the telescoping-sampler
/// quantities. Labels are 0-based; components K - k.. may be empty.
struct PartitionState {
  std::vector<int> z;
  std::vector<int> counts;    ///< n_l, length K
  std::vector<double> log_s;  ///< log unnormalised weights, length K
  double u = 1.0;
  double gamma = 1.0;

  int K() const { return static_cast<int>(log_s.size()); }
  int nodes() const { return static_cast<int>(z.size()); }
  int occupied() const;
  /// Occupancy counts of the occupied components in label order.
  std::vector<int> occupied_counts() const;
  /// Throws NumericalError if counts/K/z disagree.
  void check() const;
};

/// Per-block-pair totals of structural-zero flags x, latent weights w and
/// pair counts n, following the unordered-pair convention: diagonal blocks
/// count pairs i < j, off-diagonal blocks count every (i in l, j in m).
class BlockStats {
 public:
  BlockStats() = default;
  explicit BlockStats(int K) : K_(K), counts_(K, 0), x_(static_cast<std::size_t>(K) * K, 0), w_(static_cast<std::size_t>(K) * K, 0) {}

  int blocks() const { return K_; }
  Count x(int l, int m) const { return x_[idx(l, m)]; }
  Count w(int l, int m) const { return w_[idx(l, m)]; }
  Count size(int l) const { return counts_[l]; }
  /// n_lm = n_l n_m off the diagonal and n_l (n_l - 1) / 2 on it.
  Count pairs(int l, int m) const {
    return l == m ? counts_[l] * (counts_[l] - 1) / 2 : counts_[l] * counts_[m];
  }

  void add_pair(int l, int m, Count x, Count w);
  void set_size(int l, Count n) { counts_[l] = n; }

  bool operator==(const BlockStats&) const = default;

  friend struct NodeIncidence;

 private:
  std::size_t idx(int l, int m) const { return static_cast<std::size_t>(l) * K_ + m; }

  int K_ = 0;
  std::vector<Count> counts_;
  std::vector<Count> x_;
  std::vector<Count> w_;
};

/// Contributions of one node's incident pairs, grouped by the other
/// endpoint's label.
struct NodeIncidence {
  std::vector<Count> count;
  std::vector<Count> x;
  std::vector<Count> w;

  /// Subtract node i (currently labelled `label`) from `stats`.
  void remove_from(BlockStats& stats, int label) const;
  /// Add node i with label `label` to `stats`.
  void add_to(BlockStats& stats, int label) const;
};

BlockStats block_sufficient_stats(const FlagMatrix& x, const CountMatrix& w, std::span<const int> z, int K);
/// Incidence of node i against every other node j != i.
NodeIncidence node_incidence(int i, std::span<const int> z, const FlagMatrix& x, const CountMatrix& w, int K);
/// Statistics of the network with node i removed, in O(n + K).
BlockStats leave_one_out(const BlockStats& stats, int i, std::span<const int> z, const FlagMatrix& x,
                         const CountMatrix& w);

/// Latent representation A_ij = w_ij (1 - x_ij): x flags structural zeros
/// and w holds the latent interaction counts.
struct LatentEdges {
  FlagMatrix x;
  CountMatrix w;
};

/// Block statistics kept in sync with label moves during a label scan.
class IncrementalBlockStats {
 public:
  void rebuild(const LatentEdges& latent, std::span<const int> z, int K);
  /// Removes node i (label z[i]) and caches its incidence.
  const NodeIncidence& remove_node(int i, std::span<const int> z, const LatentEdges& latent);
  /// Re-inserts the most recently removed node under label c.
  void add_node(int c);

  const BlockStats& stats() const { return stats_; }
  const NodeIncidence& incidence() const { return incidence_; }

 private:
  BlockStats stats_;
  NodeIncidence incidence_;
};

/// Moves occupied components to labels 0..k-1 in order of first appearance
/// in z; empty components follow in ascending old label. Permutes z, counts
/// and log_s in place and returns perm with perm[new] = old.
std::vector<int> relabel_occupied(PartitionState& state);

/// Relabels an arbitrary label vector to 0..k-1 by first appearance.
std::vector<int> canonical_labels(std::span<const int> z);

}  // namespace blocksampler

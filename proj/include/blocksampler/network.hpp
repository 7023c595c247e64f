#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blocksampler/matrix.hpp"

namespace blocksampler {

using Count = std::int64_t;

/// Symmetric nonnegative integer weights with a zero diagonal.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(int n) : weights_(n, 0) {}

  int size() const { return weights_.size(); }
  Count operator()(int i, int j) const { return weights_(i, j); }

  /// Sets both (i, j) and (j, i). Throws on a self-loop or negative weight.
  void set(int i, int j, Count w);

  /// Number of unordered pairs i < j with a positive weight.
  std::int64_t nonzero_pairs() const;

  const SymmetricMatrix<Count>& weights() const { return weights_; }

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  SymmetricMatrix<Count> weights_;
};

enum class AdjacencyFormat { dense_csv, edge_list_csv };

/// Reads a network. Dense files are n rows of n integers (optional header);
/// edge lists have header `i,j,w` with 1-based ids. `n` overrides the node
/// count of an edge list (isolated trailing nodes).
AdjacencyMatrix load_adjacency(const std::filesystem::path& path, AdjacencyFormat format, int n = 0);
/// Picks the format from the header line: `i,j,w` means edge list.
AdjacencyMatrix load_adjacency(const std::filesystem::path& path, int n = 0);
void write_edge_list(const std::filesystem::path& path, const AdjacencyMatrix& a);
void write_dense(const std::filesystem::path& path, const AdjacencyMatrix& a);

/// Column transform applied to covariates before fitting.
struct CovariateTransform {
  std::vector<double> mean;
  std::vector<double> sd;
  bool standardized = false;
  bool intercept = false;

  bool operator==(const CovariateTransform&) const = default;
};

/// A q-vector y_ij per unordered pair, stored densely so y(i, j) == y(j, i).
class CovariateTensor {
 public:
  CovariateTensor() = default;
  CovariateTensor(int n, int q) : n_(n), q_(q), data_(static_cast<std::size_t>(n) * n * q, 0.0) {}

  int nodes() const { return n_; }
  int dim() const { return q_; }

  std::span<const double> at(int i, int j) const {
    return {data_.data() + (static_cast<std::size_t>(i) * n_ + j) * q_, static_cast<std::size_t>(q_)};
  }
  void set(int i, int j, std::span<const double> y);

  const CovariateTransform& transform() const { return transform_; }

  /// Column-standardised copy (mean 0, sd 1 over pairs i < j). Constant
  /// columns are centred but not scaled.
  CovariateTensor standardized() const;
  /// Copy with a leading column of ones.
  CovariateTensor with_intercept() const;
  /// Applies a transform recorded from a previous standardisation.
  CovariateTensor apply(const CovariateTransform& t) const;

 private:
  int n_ = 0;
  int q_ = 0;
  std::vector<double> data_;
  CovariateTransform transform_;
};

/// Long-format rows `i,j,y1,...,yq`, one per unordered pair. q = 0 infers
/// the dimension from the header.
CovariateTensor load_covariates(const std::filesystem::path& path, int n, int q = 0);
void write_covariates(const std::filesystem::path& path, const CovariateTensor& y);

/// Pairs hidden for link prediction together with their true weights.
struct MaskSet {
  std::vector<std::pair<int, int>> pairs;  // i < j, 0-based
  std::vector<Count> original;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
};

/// Zeroes round-half-up(fraction * #nonzero pairs) randomly chosen nonzero
/// pairs. Returns the training network and the mask.
std::pair<AdjacencyMatrix, MaskSet> mask_nonzero(const AdjacencyMatrix& a, double fraction, std::uint64_t seed);
/// Restores the masked weights.
AdjacencyMatrix unmask(const AdjacencyMatrix& train, const MaskSet& mask);
void write_mask(const std::filesystem::path& path, const MaskSet& mask);
MaskSet load_mask(const std::filesystem::path& path);

/// Generator truth. Scalar block parameters are stored as K x K x 1 tensors.
struct GroundTruth {
  std::vector<int> z;  // 0-based labels
  int K = 0;
  BlockTensor p;
  BlockTensor psi;
  BlockTensor r;
  BlockTensor lambda;
  BlockTensor beta1;
  BlockTensor beta2;
  double dispersion = 0.0;
};

void write_labels(const std::filesystem::path& path, const std::vector<int>& z);
/// Reads `node,label` rows (1-based both) into 0-based labels.
std::vector<int> load_labels(const std::filesystem::path& path);

/// Simulation scenarios with three equiprobable communities:
///   1: ZINB with p = (0.1, 0.7), psi = (0.1, 0.2), r = (5, 3) (within, between)
///   2: ZIP  with p = (0.1, 0.7), lambda = (3.0, 1.5)
std::pair<AdjacencyMatrix, GroundTruth> generate_scenario(int scenario, int n, std::uint64_t seed);

struct CzinbNetworkSpec {
  int n = 60;
  int q = 3;          ///< number of random covariates
  int K = 2;
  bool intercept = true;  ///< linear predictor uses (1, y) instead of y
  BlockTensor beta1;  ///< K x K x (q + intercept)
  BlockTensor beta2;
  double r = 2.0;
  std::vector<double> proportions;  ///< empty means uniform
};

struct CzinbNetwork {
  AdjacencyMatrix adjacency;
  CovariateTensor covariates;  ///< the q raw covariates, no intercept column
  GroundTruth truth;
};

/// Covariates are i.i.d. standard normal coordinates per pair.
CzinbNetwork generate_czinb_network(const CzinbNetworkSpec& spec, std::uint64_t seed);

}  // namespace blocksampler

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace blocksampler {

/// Dense n x n matrix whose writes keep (i, j) and (j, i) equal.
template <typename T>
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int n, T fill = T{}) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {
    if (n < 0) throw std::invalid_argument("matrix dimension must be nonnegative");
  }

  int size() const { return n_; }

  T operator()(int i, int j) const { return data_[index(i, j)]; }

  void set(int i, int j, T value) {
    data_[index(i, j)] = value;
    data_[index(j, i)] = value;
  }

  std::span<const T> row(int i) const { return {data_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)}; }

  bool operator==(const SymmetricMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  std::vector<T> data_;
};

/// K x K x d tensor indexed by block pair, symmetric in the pair. Holds
/// regression coefficients (d = covariate dimension) or scalars (d = 1).
class BlockTensor {
 public:
  BlockTensor() = default;
  BlockTensor(int K, int dim, double fill = 0.0)
      : K_(K), dim_(dim), data_(static_cast<std::size_t>(K) * K * dim, fill) {}

  int blocks() const { return K_; }
  int dim() const { return dim_; }

  std::span<const double> at(int l, int m) const { return {data_.data() + offset(l, m), static_cast<std::size_t>(dim_)}; }
  double scalar(int l, int m) const { return data_[offset(l, m)]; }

  void set(int l, int m, std::span<const double> value) {
    for (int s = 0; s < dim_; ++s) {
      data_[offset(l, m) + s] = value[s];
      data_[offset(m, l) + s] = value[s];
    }
  }
  void set_scalar(int l, int m, double value) {
    data_[offset(l, m)] = value;
    data_[offset(m, l)] = value;
  }

  /// New tensor whose block (a, b) is this tensor's (perm[a], perm[b]).
  /// perm may be shorter than blocks(); the result has perm.size() blocks.
  BlockTensor permuted(std::span<const int> perm) const {
    BlockTensor out(static_cast<int>(perm.size()), dim_);
    for (std::size_t a = 0; a < perm.size(); ++a) {
      for (std::size_t b = a; b < perm.size(); ++b) out.set(static_cast<int>(a), static_cast<int>(b), at(perm[a], perm[b]));
    }
    return out;
  }

  /// Grow or shrink to K blocks keeping the leading blocks; new entries get `fill`.
  void resize(int K, double fill = 0.0) {
    BlockTensor out(K, dim_, fill);
    const int keep = K < K_ ? K : K_;
    for (int a = 0; a < keep; ++a) {
      for (int b = a; b < keep; ++b) out.set(a, b, at(a, b));
    }
    *this = std::move(out);
  }

  const std::vector<double>& raw() const { return data_; }

  bool operator==(const BlockTensor&) const = default;

 private:
  std::size_t offset(int l, int m) const { return (static_cast<std::size_t>(l) * K_ + m) * dim_; }

  int K_ = 0;
  int dim_ = 1;
  std::vector<double> data_;
};

}  // namespace blocksampler

#include "blocksampler/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "blocksampler/distributions.hpp"
#include "blocksampler/error.hpp"
#include "blocksampler/rng.hpp"
#include "csv_util.hpp"

namespace blocksampler {

namespace fs = std::filesystem;

void AdjacencyMatrix::set(int i, int j, Count w) {
  if (i == j) {
    if (w != 0) throw InputError("self-loop at node " + std::to_string(i + 1));
    return;
  }
  if (w < 0) throw InputError("negative weight at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  weights_.set(i, j, w);
}

std::int64_t AdjacencyMatrix::nonzero_pairs() const {
  std::int64_t count = 0;
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) count += (*this)(i, j) > 0;
  }
  return count;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

AdjacencyMatrix read_dense(const fs::path& path, const std::vector<csv::Row>& rows) {
  std::size_t start = 0;
  if (!rows.empty() && !csv::is_numeric_row(rows.front())) start = 1;
  const int n = static_cast<int>(rows.size() - start);
  AdjacencyMatrix a(n);
  std::vector<Count> values(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[start + i];
    if (static_cast<int>(row.fields.size()) != n) {
      throw InputError(csv::where(path, row) + ": expected " + std::to_string(n) + " columns");
    }
    for (int j = 0; j < n; ++j) {
      const long long v = csv::integer(path, row, j);
      if (v < 0) throw InputError(csv::where(path, row) + ": negative weight");
      values[static_cast<std::size_t>(i) * n + j] = v;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (values[static_cast<std::size_t>(i) * n + i] != 0) {
      throw InputError("nonzero diagonal at node " + std::to_string(i + 1));
    }
    for (int j = i + 1; j < n; ++j) {
      const Count wij = values[static_cast<std::size_t>(i) * n + j];
      const Count wji = values[static_cast<std::size_t>(j) * n + i];
      if (wij != wji) {
        throw InputError("asymmetric adjacency at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
      a.set(i, j, wij);
    }
  }
  return a;
}

AdjacencyMatrix read_edge_list(const fs::path& path, const std::vector<csv::Row>& rows, int n_hint) {
  std::size_t start = 0;
  if (!rows.empty() && !csv::is_numeric_row(rows.front())) start = 1;
  struct Edge {
    int i, j;
    Count w;
    const csv::Row* row;
  };
  std::vector<Edge> edges;
  int n = n_hint;
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() < 3) throw InputError(csv::where(path, row) + ": expected i,j,w");
    const long long i = csv::integer(path, row, 0);
    const long long j = csv::integer(path, row, 1);
    const long long w = csv::integer(path, row, 2);
    if (i < 1 || j < 1) throw InputError(csv::where(path, row) + ": node ids are 1-based");
    if (i == j) throw InputError(csv::where(path, row) + ": self-loop at node " + std::to_string(i));
    if (w < 0) throw InputError(csv::where(path, row) + ": negative weight");
    edges.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), w, &row});
    n = std::max<int>(n, static_cast<int>(std::max(i, j)));
  }
  AdjacencyMatrix a(n);
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  for (const auto& e : edges) {
    if (e.i >= n || e.j >= n) throw InputError(csv::where(path, *e.row) + ": node id exceeds node count");
    const auto key = static_cast<std::size_t>(std::min(e.i, e.j)) * n + std::max(e.i, e.j);
    if (seen[key] && a(e.i, e.j) != e.w) {
      throw InputError(csv::where(path, *e.row) + ": conflicting weights for pair (" + std::to_string(e.i + 1) + "," +
                       std::to_string(e.j + 1) + ")");
    }
    seen[key] = 1;
    a.set(e.i, e.j, e.w);
  }
  return a;
}

}  // namespace

AdjacencyMatrix load_adjacency(const fs::path& path, AdjacencyFormat format, int n) {
  const auto rows = csv::read(path);
  if (format == AdjacencyFormat::dense_csv) return read_dense(path, rows);
  return read_edge_list(path, rows, n);
}

AdjacencyMatrix load_adjacency(const fs::path& path, int n) {
  const auto rows = csv::read(path);
  const bool edge_header = !rows.empty() && rows.front().fields.size() == 3 && rows.front().fields[0] == "i" &&
                           rows.front().fields[1] == "j";
  if (edge_header) return read_edge_list(path, rows, n);
  return read_dense(path, rows);
}

void write_edge_list(const fs::path& path, const AdjacencyMatrix& a) {
  auto out = open_out(path);
  out << "i,j,w\n";
  for (int i = 0; i < a.size(); ++i) {
    for (int j = i + 1; j < a.size(); ++j) {
      if (a(i, j) > 0) out << i + 1 << ',' << j + 1 << ',' << a(i, j) << '\n';
    }
  }
}

void write_dense(const fs::path& path, const AdjacencyMatrix& a) {
  auto out = open_out(path);
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) out << (j ? "," : "") << a(i, j);
    out << '\n';
  }
}

void CovariateTensor::set(int i, int j, std::span<const double> y) {
  if (static_cast<int>(y.size()) != q_) throw InputError("covariate vector has wrong dimension");
  for (int s = 0; s < q_; ++s) {
    data_[(static_cast<std::size_t>(i) * n_ + j) * q_ + s] = y[s];
    data_[(static_cast<std::size_t>(j) * n_ + i) * q_ + s] = y[s];
  }
}

CovariateTensor CovariateTensor::standardized() const {
  CovariateTransform t;
  t.mean.assign(q_, 0.0);
  t.sd.assign(q_, 1.0);
  t.standardized = true;
  t.intercept = transform_.intercept;
  const double pairs = 0.5 * n_ * (n_ - 1);
  for (int s = 0; s < q_; ++s) {
    double sum = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) sum += at(i, j)[s];
    }
    const double mean = sum / pairs;
    double ss = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) ss += (at(i, j)[s] - mean) * (at(i, j)[s] - mean);
    }
    const double sd = pairs > 1 ? std::sqrt(ss / (pairs - 1)) : 0.0;
    t.mean[s] = mean;
    t.sd[s] = sd > 1e-12 ? sd : 1.0;
  }
  return apply(t);
}

CovariateTensor CovariateTensor::apply(const CovariateTransform& t) const {
  if (t.standardized && (static_cast<int>(t.mean.size()) != q_ || static_cast<int>(t.sd.size()) != q_)) {
    throw InputError("covariate transform does not match covariate dimension");
  }
  CovariateTensor out(n_, q_);
  std::vector<double> y(q_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      for (int s = 0; s < q_; ++s) y[s] = t.standardized ? (at(i, j)[s] - t.mean[s]) / t.sd[s] : at(i, j)[s];
      out.set(i, j, y);
    }
  }
  out.transform_ = t;
  out.transform_.intercept = false;
  return t.intercept ? out.with_intercept() : out;
}

CovariateTensor CovariateTensor::with_intercept() const {
  CovariateTensor out(n_, q_ + 1);
  std::vector<double> y(q_ + 1, 1.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      std::copy(at(i, j).begin(), at(i, j).end(), y.begin() + 1);
      out.set(i, j, y);
    }
  }
  out.transform_ = transform_;
  out.transform_.intercept = true;
  return out;
}

CovariateTensor load_covariates(const fs::path& path, int n, int q) {
  const auto rows = csv::read(path);
  if (rows.empty()) throw InputError(path.string() + ": empty covariate file");
  std::size_t start = csv::is_numeric_row(rows.front()) ? 0 : 1;
  if (q <= 0) q = static_cast<int>(rows.front().fields.size()) - 2;
  if (q <= 0) throw InputError(path.string() + ": covariate file needs columns i,j,y1,...");
  if (n <= 0) {
    for (std::size_t r = start; r < rows.size(); ++r) {
      n = std::max<int>(n, static_cast<int>(std::max(csv::integer(path, rows[r], 0), csv::integer(path, rows[r], 1))));
    }
  }
  CovariateTensor y(n, q);
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  std::vector<double> values(q);
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (static_cast<int>(row.fields.size()) != q + 2) {
      throw InputError(csv::where(path, row) + ": expected " + std::to_string(q + 2) + " columns");
    }
    const long long i = csv::integer(path, row, 0);
    const long long j = csv::integer(path, row, 1);
    if (i < 1 || j < 1 || i > n || j > n || i == j) throw InputError(csv::where(path, row) + ": invalid pair");
    for (int s = 0; s < q; ++s) {
      values[s] = csv::number(path, row, s + 2);
      if (!std::isfinite(values[s])) throw InputError(csv::where(path, row) + ": non-finite covariate");
    }
    const int a = static_cast<int>(std::min(i, j)) - 1;
    const int b = static_cast<int>(std::max(i, j)) - 1;
    const auto key = static_cast<std::size_t>(a) * n + b;
    if (seen[key]) {
      const auto prev = y.at(a, b);
      if (!std::equal(prev.begin(), prev.end(), values.begin())) {
        throw InputError(csv::where(path, row) + ": conflicting duplicate for pair (" + std::to_string(a + 1) + "," +
                         std::to_string(b + 1) + ")");
      }
    }
    seen[key] = 1;
    y.set(a, b, values);
  }
  std::ostringstream missing;
  int missing_count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!seen[static_cast<std::size_t>(i) * n + j]) {
        if (missing_count < 10) missing << (missing_count ? " " : "") << "(" << i + 1 << "," << j + 1 << ")";
        ++missing_count;
      }
    }
  }
  if (missing_count > 0) {
    throw InputError(path.string() + ": missing covariates for " + std::to_string(missing_count) +
                     " pair(s): " + missing.str());
  }
  return y;
}

void write_covariates(const fs::path& path, const CovariateTensor& y) {
  auto out = open_out(path);
  out << "i,j";
  for (int s = 0; s < y.dim(); ++s) out << ",y" << s + 1;
  out << '\n' << std::setprecision(17);
  for (int i = 0; i < y.nodes(); ++i) {
    for (int j = i + 1; j < y.nodes(); ++j) {
      out << i + 1 << ',' << j + 1;
      for (double v : y.at(i, j)) out << ',' << v;
      out << '\n';
    }
  }
}

std::pair<AdjacencyMatrix, MaskSet> mask_nonzero(const AdjacencyMatrix& a, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw InputError("mask fraction must lie in [0, 1)");
  std::vector<std::pair<int, int>> candidates;
  for (int i = 0; i < a.size(); ++i) {
    for (int j = i + 1; j < a.size(); ++j) {
      if (a(i, j) > 0) candidates.emplace_back(i, j);
    }
  }
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(candidates.size()) + 0.5));
  RngStream rng(seed, 0x6d61736b);
  // Partial Fisher-Yates: the first `count` entries form a uniform subset.
  for (std::size_t t = 0; t < count; ++t) {
    const auto pick = t + static_cast<std::size_t>(rng.uniform() * static_cast<double>(candidates.size() - t));
    std::swap(candidates[t], candidates[std::min(pick, candidates.size() - 1)]);
  }
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  AdjacencyMatrix train = a;
  MaskSet mask;
  for (const auto& [i, j] : candidates) {
    mask.pairs.emplace_back(i, j);
    mask.original.push_back(a(i, j));
    train.set(i, j, 0);
  }
  return {std::move(train), std::move(mask)};
}

AdjacencyMatrix unmask(const AdjacencyMatrix& train, const MaskSet& mask) {
  AdjacencyMatrix a = train;
  for (std::size_t t = 0; t < mask.size(); ++t) a.set(mask.pairs[t].first, mask.pairs[t].second, mask.original[t]);
  return a;
}

void write_mask(const fs::path& path, const MaskSet& mask) {
  auto out = open_out(path);
  out << "i,j,original\n";
  for (std::size_t t = 0; t < mask.size(); ++t) {
    out << mask.pairs[t].first + 1 << ',' << mask.pairs[t].second + 1 << ',' << mask.original[t] << '\n';
  }
}

MaskSet load_mask(const fs::path& path) {
  const auto rows = csv::read(path);
  MaskSet mask;
  const std::size_t start = !rows.empty() && !csv::is_numeric_row(rows.front()) ? 1 : 0;
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const int i = static_cast<int>(csv::integer(path, row, 0)) - 1;
    const int j = static_cast<int>(csv::integer(path, row, 1)) - 1;
    if (i < 0 || j < 0 || i == j) throw InputError(csv::where(path, row) + ": invalid pair");
    mask.pairs.emplace_back(std::min(i, j), std::max(i, j));
    mask.original.push_back(row.fields.size() > 2 ? csv::integer(path, row, 2) : 0);
  }
  return mask;
}

void write_labels(const fs::path& path, const std::vector<int>& z) {
  auto out = open_out(path);
  out << "node,label\n";
  for (std::size_t i = 0; i < z.size(); ++i) out << i + 1 << ',' << z[i] + 1 << '\n';
}

std::vector<int> load_labels(const fs::path& path) {
  const auto rows = csv::read(path);
  const std::size_t start = !rows.empty() && !csv::is_numeric_row(rows.front()) ? 1 : 0;
  std::vector<std::pair<long long, int>> entries;
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1) {
      entries.emplace_back(static_cast<long long>(entries.size() + 1), static_cast<int>(csv::integer(path, row, 0)) - 1);
    } else {
      entries.emplace_back(csv::integer(path, row, 0), static_cast<int>(csv::integer(path, row, 1)) - 1);
    }
  }
  std::sort(entries.begin(), entries.end());
  std::vector<int> z;
  for (std::size_t t = 0; t < entries.size(); ++t) {
    if (entries[t].first != static_cast<long long>(t + 1)) throw InputError(path.string() + ": node ids must be 1..n");
    if (entries[t].second < 0) throw InputError(path.string() + ": labels are 1-based");
    z.push_back(entries[t].second);
  }
  return z;
}

std::pair<AdjacencyMatrix, GroundTruth> generate_scenario(int scenario, int n, std::uint64_t seed) {
  if (scenario != 1 && scenario != 2) throw InputError("unknown scenario " + std::to_string(scenario));
  constexpr int kTrue = 3;
  if (n < kTrue) throw InputError("scenario networks need at least 3 nodes");
  RngStream rng(seed, 0x7363656e + static_cast<std::uint64_t>(scenario));
  GroundTruth truth;
  truth.K = kTrue;
  truth.p = BlockTensor(kTrue, 1);
  truth.psi = BlockTensor(kTrue, 1);
  truth.r = BlockTensor(kTrue, 1);
  truth.lambda = BlockTensor(kTrue, 1);
  for (int l = 0; l < kTrue; ++l) {
    for (int m = l; m < kTrue; ++m) {
      const bool within = l == m;
      truth.p.set_scalar(l, m, within ? 0.1 : 0.7);
      truth.psi.set_scalar(l, m, within ? 0.1 : 0.2);
      truth.r.set_scalar(l, m, within ? 5.0 : 3.0);
      truth.lambda.set_scalar(l, m, within ? 3.0 : 1.5);
    }
  }
  const std::vector<double> equal(kTrue, 1.0);
  truth.z.resize(n);
  for (int i = 0; i < n; ++i) truth.z[i] = static_cast<int>(sample_categorical(rng, equal));

  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int l = truth.z[i];
      const int m = truth.z[j];
      if (sample_bernoulli(rng, truth.p.scalar(l, m))) continue;
      const Count w = scenario == 1 ? sample_negative_binomial(rng, truth.psi.scalar(l, m), truth.r.scalar(l, m))
                                    : sample_poisson(rng, truth.lambda.scalar(l, m));
      a.set(i, j, w);
    }
  }
  return {std::move(a), std::move(truth)};
}

CzinbNetwork generate_czinb_network(const CzinbNetworkSpec& spec, std::uint64_t seed) {
  const int d = spec.q + (spec.intercept ? 1 : 0);
  if (spec.n < 2 || spec.q < 0 || spec.K < 1 || d < 1) throw InputError("invalid CZINB generator dimensions");
  if (spec.beta1.blocks() != spec.K || spec.beta2.blocks() != spec.K || spec.beta1.dim() != d || spec.beta2.dim() != d) {
    throw InputError("coefficient tensors must be K x K x (q + intercept)");
  }
  if (!(spec.r > 0.0)) throw InputError("dispersion must be positive");
  RngStream rng(seed, 0x637a696e);
  CzinbNetwork out;
  out.truth.K = spec.K;
  out.truth.beta1 = spec.beta1;
  out.truth.beta2 = spec.beta2;
  out.truth.dispersion = spec.r;
  const std::vector<double> props = spec.proportions.empty() ? std::vector<double>(spec.K, 1.0) : spec.proportions;
  out.truth.z.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) out.truth.z[i] = static_cast<int>(sample_categorical(rng, props));

  out.covariates = CovariateTensor(spec.n, spec.q);
  out.adjacency = AdjacencyMatrix(spec.n);
  std::vector<double> y(spec.q);
  std::vector<double> design(d, 1.0);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = i + 1; j < spec.n; ++j) {
      for (int s = 0; s < spec.q; ++s) y[s] = rng.normal();
      out.covariates.set(i, j, y);
      std::copy(y.begin(), y.end(), design.begin() + (spec.intercept ? 1 : 0));
      const auto b1 = spec.beta1.at(out.truth.z[i], out.truth.z[j]);
      const auto b2 = spec.beta2.at(out.truth.z[i], out.truth.z[j]);
      const double eta1 = std::inner_product(design.begin(), design.end(), b1.begin(), 0.0);
      const double eta2 = std::inner_product(design.begin(), design.end(), b2.begin(), 0.0);
      if (sample_bernoulli(rng, logistic(eta2))) continue;
      out.adjacency.set(i, j, sample_negative_binomial(rng, logistic(eta1), spec.r));
    }
  }
  return out;
}

}  // namespace blocksampler

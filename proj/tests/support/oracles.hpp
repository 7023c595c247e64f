#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blocksampler/czinb_kernel.hpp"
#include "blocksampler/partition.hpp"
#include "blocksampler/rng.hpp"
#include "blocksampler/zinb_kernel.hpp"
#include "blocksampler/zip_kernel.hpp"
#include "support/quadrature.hpp"

namespace testsupport {

using namespace blocksampler;

/// Pairs a < b whose labels form the unordered block {l, m}.
inline std::vector<std::pair<int, int>> block_pairs(const std::vector<int>& z, int l, int m) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(z.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if ((z[a] == l && z[b] == m) || (z[a] == m && z[b] == l)) out.emplace_back(a, b);
    }
  }
  return out;
}

/// sum_{k < w} log(r + k), summed term by term.
inline double log_rising(double r, Count w) {
  double s = 0.0;
  for (Count k = 0; k < w; ++k) s += std::log(r + static_cast<double>(k));
  return s;
}

/// Label log-weights for node i with P and Psi integrated by quadrature.
/// Normalising constants common to every label are dropped.
inline std::vector<double> zinb_label_oracle(int i, std::vector<int> z, const LatentEdges& latent,
                                             const BlockTensor& r, std::span<const double> log_s,
                                             const ZinbPriors& pr) {
  const int K = static_cast<int>(log_s.size());
  std::vector<double> out(K);
  for (int c = 0; c < K; ++c) {
    z[i] = c;
    double total = log_s[c];
    for (int l = 0; l < K; ++l) {
      for (int m = l; m < K; ++m) {
        const auto pairs = block_pairs(z, l, m);
        double xs = 0.0, ws = 0.0;
        const double np = static_cast<double>(pairs.size());
        const double rr = r.scalar(l, m);
        for (auto [a, b] : pairs) {
          xs += latent.x(a, b);
          ws += static_cast<double>(latent.w(a, b));
          total += log_rising(rr, latent.w(a, b));
        }
        total += tanh_sinh_log_integral([&](double lp, double l1p) {
          return (pr.a_p - 1.0 + xs) * lp + (pr.b_p - 1.0 + np - xs) * l1p;
        });
        total += tanh_sinh_log_integral([&](double lq, double l1q) {
          return (pr.a_psi - 1.0 + np * rr) * lq + (pr.b_psi - 1.0 + ws) * l1q;
        });
      }
    }
    out[c] = total;
  }
  return out;
}

/// Label log-weights for node i with P and Lambda integrated by quadrature.
inline std::vector<double> zip_label_oracle(int i, std::vector<int> z, const LatentEdges& latent,
                                            std::span<const double> log_s, const ZipPriors& pr) {
  const int K = static_cast<int>(log_s.size());
  std::vector<double> out(K);
  for (int c = 0; c < K; ++c) {
    z[i] = c;
    double total = log_s[c];
    for (int l = 0; l < K; ++l) {
      for (int m = l; m < K; ++m) {
        const auto pairs = block_pairs(z, l, m);
        double xs = 0.0, ws = 0.0;
        const double np = static_cast<double>(pairs.size());
        for (auto [a, b] : pairs) {
          xs += latent.x(a, b);
          ws += static_cast<double>(latent.w(a, b));
        }
        total += tanh_sinh_log_integral([&](double lp, double l1p) {
          return (pr.a_p - 1.0 + xs) * lp + (pr.b_p - 1.0 + np - xs) * l1p;
        });
        total += half_line_log_integral([&](double lam) {
          return (pr.a_lambda - 1.0 + ws) * std::log(lam) - (pr.b_lambda + np) * lam;
        });
      }
    }
    out[c] = total;
  }
  return out;
}

/// log of the integral over beta of exp(sum_k kappa_k y_k'beta - omega_k (y_k'beta)^2 / 2)
/// against the N(b0, B0) density, by a trapezoid rule in whitened coordinates.
inline double pg_block_oracle(const std::vector<Eigen::VectorXd>& ys, const std::vector<double>& kappa,
                              const std::vector<double>& omega, const CzinbPriors& pr) {
  const int d = static_cast<int>(pr.b0.size());
  const Eigen::MatrixXd prior_prec = pr.B0.inverse();
  Eigen::MatrixXd P = prior_prec;
  Eigen::VectorXd h = prior_prec * pr.b0;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    P += omega[k] * ys[k] * ys[k].transpose();
    h += kappa[k] * ys[k];
  }
  // grid centred near the mode, scaled by the curvature
  const Eigen::VectorXd centre = P.llt().solve(h) + Eigen::VectorXd::Constant(d, 0.05);
  const Eigen::MatrixXd L = Eigen::MatrixXd(P.inverse().llt().matrixL());
  const double log_det_L = L.diagonal().array().log().sum();
  const double log_norm = -0.5 * d * std::log(2.0 * M_PI) - 0.5 * std::log(pr.B0.determinant());
  return log_det_L + trapezoid_log_integral(
                         [&](const std::vector<double>& u) {
                           Eigen::VectorXd uv(d);
                           for (int k = 0; k < d; ++k) uv[k] = u[k];
                           const Eigen::VectorXd beta = centre + L * uv;
                           double out = log_norm - 0.5 * (beta - pr.b0).dot(prior_prec * (beta - pr.b0));
                           for (std::size_t k = 0; k < ys.size(); ++k) {
                             const double eta = ys[k].dot(beta);
                             out += kappa[k] * eta - 0.5 * omega[k] * eta * eta;
                           }
                           return out;
                         },
                         d);
}

/// Label log-weights for node i with both coefficient sets integrated by
/// quadrature, given the Polya-Gamma variables.
inline std::vector<double> czinb_label_oracle(int i, std::vector<int> z, const CovariateTensor& y,
                                              const LatentEdges& latent, const PgAugmentation& pg, double r,
                                              std::span<const double> log_s, const CzinbPriors& pr) {
  const int K = static_cast<int>(log_s.size());
  const int d = y.dim();
  std::vector<double> out(K);
  for (int c = 0; c < K; ++c) {
    z[i] = c;
    double total = log_s[c];
    for (int l = 0; l < K; ++l) {
      for (int m = l; m < K; ++m) {
        std::vector<Eigen::VectorXd> ys;
        std::vector<double> k1, o1, k2, o2;
        for (auto [a, b] : block_pairs(z, l, m)) {
          Eigen::VectorXd v(d);
          for (int s = 0; s < d; ++s) v[s] = y.at(a, b)[s];
          ys.push_back(v);
          k1.push_back((r - static_cast<double>(latent.w(a, b))) / 2.0);
          o1.push_back(pg.omega1(a, b));
          k2.push_back(latent.x(a, b) - 0.5);
          o2.push_back(pg.omega2(a, b));
        }
        total += pg_block_oracle(ys, k1, o1, pr) + pg_block_oracle(ys, k2, o2, pr);
      }
    }
    out[c] = total;
  }
  return out;
}

/// Largest relative error between the label probabilities implied by two
/// sets of unnormalised log-weights.
inline double max_relative_probability_error(std::span<const double> got, std::span<const double> want) {
  auto normalise = [](std::span<const double> v) {
    double mx = -INFINITY;
    for (double x : v) mx = std::max(mx, x);
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    std::vector<double> out;
    for (double x : v) out.push_back(x - mx - std::log(s));
    return out;
  };
  const auto a = normalise(got), b = normalise(want);
  double worst = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) worst = std::max(worst, std::abs(std::expm1(a[c] - b[c])));
  return worst;
}

/// A small random labelled network with latent edges, as used by the
/// label-weight checks.
struct LabelInstance {
  int n = 0;
  int K = 0;
  int node = 0;
  std::vector<int> z;
  LatentEdges latent;
  AdjacencyMatrix a;
  std::vector<double> log_s;
};

inline LabelInstance random_label_instance(RngStream& rng, int max_n = 4, int max_k = 3) {
  LabelInstance inst;
  inst.n = 2 + static_cast<int>(rng.uniform() * (max_n - 1));
  inst.K = 1 + static_cast<int>(rng.uniform() * max_k);
  inst.node = static_cast<int>(rng.uniform() * inst.n);
  inst.z.resize(inst.n);
  for (int& v : inst.z) v = static_cast<int>(rng.uniform() * inst.K);
  inst.latent.x = FlagMatrix(inst.n, 0);
  inst.latent.w = CountMatrix(inst.n, 0);
  inst.a = AdjacencyMatrix(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    for (int j = i + 1; j < inst.n; ++j) {
      const bool x = rng.uniform() < 0.3;
      const Count w = static_cast<Count>(rng.uniform() * 9.0);
      inst.latent.x.set(i, j, x ? 1 : 0);
      inst.latent.w.set(i, j, w);
      inst.a.set(i, j, x ? 0 : w);
    }
  }
  for (int c = 0; c < inst.K; ++c) inst.log_s.push_back(rng.normal());
  return inst;
}

/// State whose labels are the instance's, for driving a kernel label scan.
inline PartitionState instance_state(const LabelInstance& inst) {
  PartitionState s;
  s.z = inst.z;
  s.counts.assign(inst.K, 0);
  for (int v : inst.z) ++s.counts[v];
  s.log_s = inst.log_s;
  return s;
}

/// Kernel label log-weights for the instance's node (including log S), via
/// the incremental label-scan interface.
template <typename Kernel>
std::vector<double> kernel_label_weights(Kernel& kernel, const LabelInstance& inst) {
  PartitionState s = instance_state(inst);
  kernel.begin_label_scan(s);
  kernel.remove_node(inst.node, s.z);
  std::vector<double> out(inst.K);
  kernel.label_logweights(inst.node, s.z, out);
  for (int c = 0; c < inst.K; ++c) out[c] += inst.log_s[c];
  return out;
}

}  // namespace testsupport

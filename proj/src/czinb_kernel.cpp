#include "blocksampler/czinb_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blocksampler/distributions.hpp"
#include "blocksampler/error.hpp"
#include "blocksampler/zinb_kernel.hpp"

namespace blocksampler {

CzinbPriors CzinbPriors::isotropic(int d, double scale) {
  CzinbPriors out;
  out.b0 = Eigen::VectorXd::Zero(d);
  out.B0 = scale * Eigen::MatrixXd::Identity(d, d);
  return out;
}

void CzinbPriors::validate(int d) const {
  if (b0.size() != d || B0.rows() != d || B0.cols() != d) {
    throw InputError("coefficient prior has dimension " + std::to_string(b0.size()) + ", covariates have " +
                     std::to_string(d));
  }
  if (!(a_r > 0 && b_r > 0)) throw InputError("dispersion prior hyperparameters must be positive");
  if (!B0.isApprox(B0.transpose()) || B0.llt().info() != Eigen::Success) {
    throw InputError("prior covariance B0 must be symmetric positive definite");
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double out = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) out += a[k] * b[k];
  return out;
}

// -0.5 log|P| + 0.5 h' P^{-1} h by an in-place Cholesky of a d x d
// row-major copy in `L`; `v` receives L^{-1} h.
double gaussian_log_evidence(double* L, double* v, int d) {
  double log_det = 0.0;
  for (int j = 0; j < d; ++j) {
    double diag = L[j * d + j];
    for (int k = 0; k < j; ++k) diag -= L[j * d + k] * L[j * d + k];
    if (!(diag > 0.0)) throw NumericalError("block precision is not positive definite");
    const double ljj = std::sqrt(diag);
    L[j * d + j] = ljj;
    log_det += std::log(ljj);
    for (int i = j + 1; i < d; ++i) {
      double s = L[i * d + j];
      for (int k = 0; k < j; ++k) s -= L[i * d + k] * L[j * d + k];
      L[i * d + j] = s / ljj;
    }
  }
  double quad = 0.0;
  for (int i = 0; i < d; ++i) {
    double s = v[i];
    for (int k = 0; k < i; ++k) s -= L[i * d + k] * v[k];
    v[i] = s / L[i * d + i];
    quad += v[i] * v[i];
  }
  return -log_det + 0.5 * quad;
}

double eigen_log_evidence(const Eigen::MatrixXd& P, const Eigen::VectorXd& h) {
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) throw NumericalError("block precision is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  return -L.diagonal().array().log().sum() + 0.5 * h.dot(llt.solve(h));
}

Eigen::VectorXd draw_gaussian_from_precision(const Eigen::MatrixXd& P, const Eigen::VectorXd& h, RngStream& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) throw NumericalError("block precision is not positive definite");
  Eigen::VectorXd eps(h.size());
  for (Eigen::Index k = 0; k < eps.size(); ++k) eps[k] = rng.normal();
  return llt.solve(h) + llt.matrixU().solve(eps);
}

struct PairSums {
  std::vector<Eigen::MatrixXd> prec;
  std::vector<Eigen::VectorXd> lin;
};

// Total collapsed log evidence of both links over all blocks; pairs
// touching `skip` are left out.
double total_log_evidence(std::span<const int> z, int K, const CovariateTensor& y, const LatentEdges& latent,
                          const PgAugmentation& pg, double r, const CzinbPriors& priors, int skip) {
  const int n = y.nodes();
  const int d = y.dim();
  const Eigen::MatrixXd prior_prec = priors.B0.inverse();
  const Eigen::VectorXd prior_lin = prior_prec * priors.b0;
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    std::vector<Eigen::MatrixXd> prec(static_cast<std::size_t>(K) * K, prior_prec);
    std::vector<Eigen::VectorXd> lin(static_cast<std::size_t>(K) * K, prior_lin);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (i == skip || j == skip) continue;
        const auto yij = y.at(i, j);
        const Eigen::Map<const Eigen::VectorXd> v(yij.data(), d);
        const double omega = s == 0 ? pg.omega1(i, j) : pg.omega2(i, j);
        const double kappa = s == 0 ? 0.5 * (r - static_cast<double>(latent.w(i, j))) : latent.x(i, j) - 0.5;
        const std::size_t b = static_cast<std::size_t>(std::min(z[i], z[j])) * K + std::max(z[i], z[j]);
        prec[b] += omega * v * v.transpose();
        lin[b] += kappa * v;
      }
    }
    for (int l = 0; l < K; ++l) {
      for (int m = l; m < K; ++m) total += eigen_log_evidence(prec[l * K + m], lin[l * K + m]);
    }
  }
  return total;
}

}  // namespace

PairProbabilities logistic_links(std::span<const double> y, std::span<const double> beta1,
                                 std::span<const double> beta2) {
  if (beta1.size() != y.size() || beta2.size() != y.size()) throw InputError("coefficient and covariate dimensions differ");
  return {logistic(dot(y, beta2)), logistic(dot(y, beta1))};
}

GaussianPosterior block_gaussian_params(const Eigen::MatrixXd& Y, const Eigen::VectorXd& kappa,
                                        const Eigen::VectorXd& omega, const CzinbPriors& priors) {
  if (Y.rows() != kappa.size() || Y.rows() != omega.size()) throw InputError("block design rows differ in length");
  const Eigen::MatrixXd prior_prec = priors.B0.inverse();
  const Eigen::MatrixXd P = prior_prec + Y.transpose() * omega.asDiagonal() * Y;
  const Eigen::VectorXd h = prior_prec * priors.b0 + Y.transpose() * kappa;
  GaussianPosterior out;
  out.cov = P.inverse();
  out.mean = P.llt().solve(h);
  return out;
}

std::vector<double> czinb_collapsed_label_logweights(int i, std::span<const int> z, const CovariateTensor& y,
                                                     const LatentEdges& latent, const PgAugmentation& pg, double r,
                                                     std::span<const double> log_s, const CzinbPriors& priors) {
  const int K = static_cast<int>(log_s.size());
  std::vector<int> zc(z.begin(), z.end());
  const double without = total_log_evidence(zc, K, y, latent, pg, r, priors, i);
  std::vector<double> out(K);
  for (int c = 0; c < K; ++c) {
    zc[i] = c;
    out[c] = total_log_evidence(zc, K, y, latent, pg, r, priors, -1) - without + log_s[c];
  }
  return out;
}

LatentEdges czinb_sample_latent_edges(const AdjacencyMatrix& a, const CovariateTensor& y, std::span<const int> z,
                                      const CzinbParams& params, RngStream& rng) {
  const int n = a.size();
  LatentEdges out{FlagMatrix(n, 0), CountMatrix(n, 0)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Count aij = a(i, j);
      if (aij > 0) {
        out.w.set(i, j, aij);
        continue;
      }
      const auto pr = logistic_links(y.at(i, j), params.beta1.at(z[i], z[j]), params.beta2.at(z[i], z[j]));
      if (sample_bernoulli(rng, structural_zero_probability(pr.p, pr.psi, params.r))) {
        out.x.set(i, j, 1);
        out.w.set(i, j, sample_negative_binomial(rng, pr.psi, params.r));
      }
    }
  }
  return out;
}

PgAugmentation sample_pg_augmentation(const CovariateTensor& y, std::span<const int> z, const LatentEdges& latent,
                                      const CzinbParams& params, RngStream& rng) {
  const int n = y.nodes();
  PgAugmentation out{SymmetricMatrix<double>(n, 0.0), SymmetricMatrix<double>(n, 0.0)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto yij = y.at(i, j);
      const double eta1 = dot(yij, params.beta1.at(z[i], z[j]));
      const double eta2 = dot(yij, params.beta2.at(z[i], z[j]));
      out.omega1.set(i, j, sample_polya_gamma(static_cast<double>(latent.w(i, j)) + params.r, eta1, rng));
      out.omega2.set(i, j, sample_polya_gamma(1.0, eta2, rng));
    }
  }
  return out;
}

CzinbKernel::CzinbKernel(AdjacencyMatrix a, CovariateTensor y, CzinbPriors priors, double r_proposal_sd)
    : a_(std::move(a)), y_(std::move(y)), priors_(std::move(priors)), d_(y_.dim()), log_sd_(std::log(r_proposal_sd)) {
  if (y_.nodes() != a_.size()) throw InputError("covariates and network differ in node count");
  if (d_ < 1) throw InputError("covariate dimension must be at least 1");
  if (!(r_proposal_sd > 0.0)) throw InputError("r proposal sd must be positive");
  priors_.validate(d_);
  prior_precision_ = priors_.B0.inverse();
  prior_linear_ = prior_precision_ * priors_.b0;
  prior_chol_ = priors_.B0.llt().matrixL();
  work_.resize(2 * static_cast<std::size_t>(d_) * d_ + 2 * d_);
}

std::size_t CzinbKernel::block_offset(int s, int l, int m) const {
  const std::size_t stride = static_cast<std::size_t>(d_) * d_ + d_;
  return ((static_cast<std::size_t>(s) * K_ + l) * K_ + m) * stride;
}

void CzinbKernel::add_block_info(int s, int l, int m, const double* prec, const double* lin, double sign) {
  const int dd = d_ * d_;
  for (int pass = 0; pass < (l == m ? 1 : 2); ++pass) {
    double* dst = info_.data() + (pass == 0 ? block_offset(s, l, m) : block_offset(s, m, l));
    for (int k = 0; k < dd; ++k) dst[k] += sign * prec[k];
    for (int k = 0; k < d_; ++k) dst[dd + k] += sign * lin[k];
  }
}

void CzinbKernel::accumulate_pair(int i, int j, double* prec1, double* lin1, double* prec2, double* lin2) const {
  const auto yij = y_.at(i, j);
  const double w1 = pg_.omega1(i, j);
  const double w2 = pg_.omega2(i, j);
  const double k1 = 0.5 * (params_.r - static_cast<double>(latent_.w(i, j)));
  const double k2 = latent_.x(i, j) - 0.5;
  for (int a = 0; a < d_; ++a) {
    lin1[a] += k1 * yij[a];
    lin2[a] += k2 * yij[a];
    for (int b = 0; b < d_; ++b) {
      const double yy = yij[a] * yij[b];
      prec1[a * d_ + b] += w1 * yy;
      prec2[a * d_ + b] += w2 * yy;
    }
  }
}

void CzinbKernel::initialize(const PartitionState& state, RngStream& rng) {
  const int K = state.K();
  params_.beta1 = BlockTensor(K, d_);
  params_.beta2 = BlockTensor(K, d_);
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) {
      params_.beta1.set(l, m, std::span<const double>(priors_.b0.data(), d_));
      params_.beta2.set(l, m, std::span<const double>(priors_.b0.data(), d_));
    }
  }
  params_.r = 1.0;
  latent_ = czinb_sample_latent_edges(a_, y_, state.z, params_, rng);
  pg_ = sample_pg_augmentation(y_, state.z, latent_, params_, rng);
}

void CzinbKernel::begin_label_scan(const PartitionState& state) {
  K_ = state.K();
  const std::size_t stride = static_cast<std::size_t>(d_) * d_ + d_;
  info_.assign(2 * static_cast<std::size_t>(K_) * K_ * stride, 0.0);
  node_info_.assign(2 * static_cast<std::size_t>(K_) * stride, 0.0);
  node_count_.assign(K_, 0);
  const int n = a_.size();
  const int dd = d_ * d_;
  std::vector<double> buf(2 * stride);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::fill(buf.begin(), buf.end(), 0.0);
      accumulate_pair(i, j, buf.data(), buf.data() + dd, buf.data() + stride, buf.data() + stride + dd);
      add_block_info(0, state.z[i], state.z[j], buf.data(), buf.data() + dd, 1.0);
      add_block_info(1, state.z[i], state.z[j], buf.data() + stride, buf.data() + stride + dd, 1.0);
    }
  }
}

void CzinbKernel::remove_node(int i, std::span<const int> z) {
  const std::size_t stride = static_cast<std::size_t>(d_) * d_ + d_;
  const int dd = d_ * d_;
  std::fill(node_info_.begin(), node_info_.end(), 0.0);
  std::fill(node_count_.begin(), node_count_.end(), 0);
  const int n = a_.size();
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const int m = z[j];
    ++node_count_[m];
    double* b1 = node_info_.data() + static_cast<std::size_t>(m) * stride;
    double* b2 = node_info_.data() + (static_cast<std::size_t>(K_) + m) * stride;
    accumulate_pair(i, j, b1, b1 + dd, b2, b2 + dd);
  }
  for (int m = 0; m < K_; ++m) {
    if (node_count_[m] == 0) continue;
    for (int s = 0; s < 2; ++s) {
      const double* b = node_info_.data() + (static_cast<std::size_t>(s) * K_ + m) * stride;
      add_block_info(s, z[i], m, b, b + dd, -1.0);
    }
  }
}

void CzinbKernel::label_logweights(int, std::span<const int>, std::span<double> out) const {
  const std::size_t stride = static_cast<std::size_t>(d_) * d_ + d_;
  const int dd = d_ * d_;
  double* L0 = work_.data();
  double* L1 = L0 + dd;
  double* v0 = L1 + dd;
  double* v1 = v0 + d_;
  for (int c = 0; c < K_; ++c) {
    double total = 0.0;
    for (int m = 0; m < K_; ++m) {
      if (node_count_[m] == 0) continue;
      for (int s = 0; s < 2; ++s) {
        const double* blk = info_.data() + block_offset(s, c, m);
        const double* nd = node_info_.data() + (static_cast<std::size_t>(s) * K_ + m) * stride;
        for (int a = 0; a < d_; ++a) {
          for (int b = 0; b < d_; ++b) {
            const double base = prior_precision_(a, b) + blk[a * d_ + b];
            L0[a * d_ + b] = base;
            L1[a * d_ + b] = base + nd[a * d_ + b];
          }
          v0[a] = prior_linear_[a] + blk[dd + a];
          v1[a] = v0[a] + nd[dd + a];
        }
        total += gaussian_log_evidence(L1, v1, d_) - gaussian_log_evidence(L0, v0, d_);
      }
    }
    out[c] = total;
  }
}

void CzinbKernel::add_node(int, int c) {
  const std::size_t stride = static_cast<std::size_t>(d_) * d_ + d_;
  const int dd = d_ * d_;
  for (int m = 0; m < K_; ++m) {
    if (node_count_[m] == 0) continue;
    for (int s = 0; s < 2; ++s) {
      const double* b = node_info_.data() + (static_cast<std::size_t>(s) * K_ + m) * stride;
      add_block_info(s, c, m, b, b + dd, 1.0);
    }
  }
}

void CzinbKernel::check_consistency(const PartitionState& state) const {
  CzinbKernel fresh = *this;
  fresh.begin_label_scan(state);
  double scale = 1.0;
  for (double v : fresh.info_) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < info_.size(); ++k) {
    if (std::abs(info_[k] - fresh.info_[k]) > 1e-9 * scale) {
      throw NumericalError("incremental block information diverged from a full recount");
    }
  }
}

Eigen::VectorXd CzinbKernel::draw_prior_coefficients(RngStream& rng) const {
  Eigen::VectorXd eps(d_);
  for (int k = 0; k < d_; ++k) eps[k] = rng.normal();
  return priors_.b0 + prior_chol_ * eps;
}

void CzinbKernel::update_parameters(const PartitionState& state, RngStream& rng, SweepStats& sweep) {
  const int K = state.K();
  const int dd = d_ * d_;
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) {
      for (int s = 0; s < 2; ++s) {
        const double* blk = info_.data() + block_offset(s, l, m);
        const Eigen::MatrixXd P = prior_precision_ + Eigen::Map<const Eigen::MatrixXd>(blk, d_, d_);
        const Eigen::VectorXd h = prior_linear_ + Eigen::Map<const Eigen::VectorXd>(blk + dd, d_);
        const Eigen::VectorXd beta = draw_gaussian_from_precision(P, h, rng);
        (s == 0 ? params_.beta1 : params_.beta2).set(l, m, std::span<const double>(beta.data(), d_));
      }
    }
  }

  const int n = a_.size();
  double sum_log_psi = 0.0;
  std::vector<Count> positive;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      sum_log_psi += log_logistic(dot(y_.at(i, j), params_.beta1.at(state.z[i], state.z[j])));
      if (latent_.w(i, j) > 0) positive.push_back(latent_.w(i, j));
    }
  }
  const WeightHistogram hist = make_histogram(std::move(positive));
  auto target = [&](double r) {
    double out = r * sum_log_psi + gamma_log_pdf(r, priors_.a_r, priors_.b_r) + std::log(r);
    const double lg_r = log_gamma_fn(r);
    for (const auto& [w, mult] : hist) out += static_cast<double>(mult) * (log_gamma_fn(static_cast<double>(w) + r) - lg_r);
    return out;
  };
  const double proposal = propose_log_normal(rng, params_.r, std::exp(log_sd_));
  last_accepted_ = std::log(rng.uniform()) < target(proposal) - target(params_.r);
  if (last_accepted_) params_.r = proposal;
  ++sweep.dispersion_proposed;
  sweep.dispersion_accepted += last_accepted_ ? 1 : 0;

  latent_ = czinb_sample_latent_edges(a_, y_, state.z, params_, rng);
  pg_ = sample_pg_augmentation(y_, state.z, latent_, params_, rng);
}

void CzinbKernel::permute(std::span<const int> perm) {
  params_.beta1 = params_.beta1.permuted(perm);
  params_.beta2 = params_.beta2.permuted(perm);
}

void CzinbKernel::refresh_empty(int K, int k, RngStream& rng) {
  params_.beta1.resize(K);
  params_.beta2.resize(K);
  for (int l = 0; l < K; ++l) {
    for (int m = std::max(l, k); m < K; ++m) {
      const Eigen::VectorXd b1 = draw_prior_coefficients(rng);
      const Eigen::VectorXd b2 = draw_prior_coefficients(rng);
      params_.beta1.set(l, m, std::span<const double>(b1.data(), d_));
      params_.beta2.set(l, m, std::span<const double>(b2.data(), d_));
    }
  }
}

void CzinbKernel::adapt_proposals(int iteration) { log_sd_ = adapt_log_scale(log_sd_, last_accepted_, iteration); }

void CzinbKernel::set_params(CzinbParams params) {
  if (params.beta1.dim() != d_ || params.beta2.dim() != d_ || params.beta1.blocks() != params.beta2.blocks()) {
    throw InputError("coefficient tensors do not match the covariate dimension");
  }
  if (!(params.r > 0.0)) throw InputError("dispersion must be positive");
  params_ = std::move(params);
}

void CzinbKernel::set_data(AdjacencyMatrix a, LatentEdges latent, PgAugmentation pg) {
  if (a.size() != y_.nodes() || latent.x.size() != a.size() || pg.omega1.size() != a.size()) {
    throw InputError("data do not match the covariate tensor");
  }
  a_ = std::move(a);
  latent_ = std::move(latent);
  pg_ = std::move(pg);
}

}  // namespace blocksampler

#include <cmath>
#include <vector>

#include "blocksampler/distributions.hpp"
#include "blocksampler/dmfm.hpp"
#include "blocksampler/network.hpp"
#include "blocksampler/sweep.hpp"
#include "blocksampler/zinb_kernel.hpp"
#include "doctest.h"
#include "support/geweke.hpp"
#include "support/oracles.hpp"

using namespace blocksampler;
using namespace testsupport;

namespace {

ZinbPriors random_priors(RngStream& rng) {
  ZinbPriors p;
  p.a_p = 0.5 + 2.5 * rng.uniform();
  p.b_p = 0.5 + 2.5 * rng.uniform();
  p.a_psi = 0.5 + 2.5 * rng.uniform();
  p.b_psi = 0.5 + 2.5 * rng.uniform();
  return p;
}

BlockTensor random_dispersion(int K, RngStream& rng) {
  BlockTensor r(K, 1);
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) r.set_scalar(l, m, 0.2 + 4.0 * rng.uniform());
  }
  return r;
}

ZinbBlockParams params_for(int K, const BlockTensor& r) {
  return {BlockTensor(K, 1, 0.3), BlockTensor(K, 1, 0.4), r};
}

}  // namespace

TEST_SUITE("zinb kernel") {
  TEST_CASE("structural zero probability") {
    CHECK(structural_zero_probability(0.5, 0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(structural_zero_probability(0.0, 0.3, 2.0) == 0.0);
  }

  TEST_CASE("conjugate block draws") {
    RngStream rng(1);
    BlockStats stats(2);
    stats.set_size(0, 4);
    stats.set_size(1, 0);
    for (int t = 0; t < 6; ++t) stats.add_pair(0, 0, 1, 0);
    const BlockTensor r(2, 1, 1.0);
    double p00 = 0.0, p11 = 0.0;
    const int n = 50000;
    for (int t = 0; t < n; ++t) {
      const auto [p, psi] = gibbs_block_params(stats, r, ZinbPriors{}, rng);
      p00 += p.scalar(0, 0);
      p11 += p.scalar(1, 1);
    }
    CHECK(p00 / n == doctest::Approx(7.0 / 8.0).epsilon(0.01));
    CHECK(p11 / n == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("dispersion proposal equal to current is accepted") {
    RngStream rng(2);
    const WeightHistogram hist = make_histogram({3, 1, 3, 7});
    for (int t = 0; t < 50; ++t) CHECK(mh_update_dispersion(1.7, hist, 9, 0.3, ZinbPriors{}, 0.0, rng).accepted);
  }

  TEST_CASE("histogram groups values") {
    const WeightHistogram h = make_histogram({4, 1, 4, 4, 2});
    REQUIRE(h.size() == 3);
    CHECK(h[0] == std::pair<Count, Count>(1, 1));
    CHECK(h[2] == std::pair<Count, Count>(4, 3));
  }

  TEST_CASE("collapsed label weights match quadrature") {
    RngStream rng(3);
    for (int trial = 0; trial < 60; ++trial) {
      const LabelInstance inst = random_label_instance(rng);
      const ZinbPriors pr = random_priors(rng);
      const BlockTensor r = random_dispersion(inst.K, rng);
      const auto want = zinb_label_oracle(inst.node, inst.z, inst.latent, r, inst.log_s, pr);
      const auto direct = collapsed_label_logweights(inst.node, inst.z, inst.latent, r, inst.log_s, pr);
      CHECK(max_relative_probability_error(direct, want) < 1e-6);

      ZinbKernel kernel(inst.a, pr);
      kernel.set_params(params_for(inst.K, r));
      kernel.set_data(inst.a, inst.latent);
      const auto scanned = kernel_label_weights(kernel, inst);
      CHECK(max_relative_probability_error(scanned, want) < 1e-6);
    }
  }

  TEST_CASE("symmetric candidates get equal weights") {
    // nodes 1 and 2 are isolated from node 0 in the same way, blocks share r
    LatentEdges e{FlagMatrix(3, 0), CountMatrix(3, 0)};
    e.w.set(0, 1, 2);
    e.w.set(0, 2, 2);
    e.w.set(1, 2, 5);
    const std::vector<int> z{0, 0, 1};
    const BlockTensor r(2, 1, 1.5);
    const std::vector<double> log_s{0.0, 0.0};
    const auto w = collapsed_label_logweights(0, z, e, r, log_s, ZinbPriors{});
    CHECK(w[0] == doctest::Approx(w[1]).epsilon(1e-12));
  }

  TEST_CASE("latent imputation respects observed edges") {
    RngStream rng(4);
    const auto [a, truth] = generate_scenario(1, 30, 9);
    ZinbBlockParams p{truth.p, truth.psi, truth.r};
    const LatentEdges e = sample_latent_edges(a, truth.z, p, rng);
    for (int i = 0; i < 30; ++i) {
      for (int j = i + 1; j < 30; ++j) {
        if (a(i, j) > 0) {
          CHECK(e.x(i, j) == 0);
          CHECK(e.w(i, j) == a(i, j));
        } else if (e.x(i, j) == 0) {
          CHECK(e.w(i, j) == 0);
        }
      }
    }
  }

  TEST_CASE("incremental statistics survive many sweeps") {
    const auto [a, truth] = generate_scenario(1, 40, 3);
    ZinbKernel kernel(a);
    DmfmConfig cfg;
    RngStream rng(5);
    PartitionState s;
    s.z.resize(40);
    s.counts.assign(6, 0);
    for (int i = 0; i < 40; ++i) ++s.counts[s.z[i] = i % 6];
    s.log_s.assign(6, 0.0);
    kernel.initialize(s, rng);
    SweepOptions opt;
    opt.check_stats = true;
    opt.random_scan = true;
    CHECK_NOTHROW(for (int t = 0; t < 60; ++t) gibbs_sweep(kernel, s, cfg, opt, rng));
    CHECK(kernel.params().blocks() == s.K());
  }

  TEST_CASE("short getting-it-right run") {
    GewekeOptions opt;
    opt.iterations = 20000;
    opt.batches = 40;
    opt.seed = 21;
    for (const auto& st : geweke_zinb(opt)) {
      INFO(st.name << " forward " << st.forward_mean << " chain " << st.chain_mean);
      CHECK(std::abs(st.z) < 4.0);
    }
  }
}

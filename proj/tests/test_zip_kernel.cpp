#include <cmath>
#include <vector>

#include "blocksampler/dmfm.hpp"
#include "blocksampler/network.hpp"
#include "blocksampler/sweep.hpp"
#include "blocksampler/zip_kernel.hpp"
#include "doctest.h"
#include "support/geweke.hpp"
#include "support/oracles.hpp"

using namespace blocksampler;
using namespace testsupport;

TEST_SUITE("zip kernel") {
  TEST_CASE("structural zero probability") {
    CHECK(zip_structural_zero_probability(0.0, 2.0) == 0.0);
    const double e = std::exp(-1.0);
    CHECK(zip_structural_zero_probability(0.5, 1.0) == doctest::Approx(0.5 / (0.5 * e + 0.5)).epsilon(1e-14));
  }

  TEST_CASE("lambda conditional uses every latent pair") {
    RngStream rng(1);
    BlockStats stats(1);
    stats.set_size(0, 5);
    for (int t = 0; t < 10; ++t) stats.add_pair(0, 0, t < 4 ? 1 : 0, 2);
    ZipPriors pr;
    pr.a_lambda = 2.0;
    pr.b_lambda = 0.5;
    double lam = 0.0;
    const int n = 50000;
    for (int t = 0; t < n; ++t) lam += zip_gibbs_block_params(stats, pr, rng).lambda.scalar(0, 0);
    CHECK(lam / n == doctest::Approx((2.0 + 20.0) / (0.5 + 10.0)).epsilon(0.01));
  }

  TEST_CASE("collapsed label weights match quadrature") {
    RngStream rng(2);
    for (int trial = 0; trial < 60; ++trial) {
      const LabelInstance inst = random_label_instance(rng);
      ZipPriors pr;
      pr.a_p = 0.5 + 2.5 * rng.uniform();
      pr.b_p = 0.5 + 2.5 * rng.uniform();
      pr.a_lambda = 0.5 + 2.5 * rng.uniform();
      pr.b_lambda = 0.2 + 2.0 * rng.uniform();
      const auto want = zip_label_oracle(inst.node, inst.z, inst.latent, inst.log_s, pr);
      const auto direct = zip_collapsed_label_logweights(inst.node, inst.z, inst.latent, inst.log_s, pr);
      CHECK(max_relative_probability_error(direct, want) < 1e-6);

      ZipKernel kernel(inst.a, pr);
      kernel.set_params({BlockTensor(inst.K, 1, 0.2), BlockTensor(inst.K, 1, 1.0)});
      kernel.set_data(inst.a, inst.latent);
      CHECK(max_relative_probability_error(kernel_label_weights(kernel, inst), want) < 1e-6);
    }
  }

  TEST_CASE("incremental statistics survive many sweeps") {
    const auto [a, truth] = generate_scenario(2, 40, 3);
    ZipKernel kernel(a);
    DmfmConfig cfg;
    RngStream rng(3);
    PartitionState s;
    s.z.resize(40);
    s.counts.assign(5, 0);
    for (int i = 0; i < 40; ++i) ++s.counts[s.z[i] = i % 5];
    s.log_s.assign(5, 0.0);
    kernel.initialize(s, rng);
    SweepOptions opt;
    opt.check_stats = true;
    CHECK_NOTHROW(for (int t = 0; t < 60; ++t) gibbs_sweep(kernel, s, cfg, opt, rng));
  }

  TEST_CASE("short getting-it-right run") {
    GewekeOptions opt;
    opt.iterations = 20000;
    opt.batches = 40;
    opt.seed = 22;
    for (const auto& st : geweke_zip(opt)) {
      INFO(st.name << " forward " << st.forward_mean << " chain " << st.chain_mean);
      CHECK(std::abs(st.z) < 4.0);
    }
  }
}

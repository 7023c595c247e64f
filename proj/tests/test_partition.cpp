#include <vector>

#include "blocksampler/error.hpp"
#include "blocksampler/partition.hpp"
#include "blocksampler/rng.hpp"
#include "blocksampler/zinb_kernel.hpp"
#include "doctest.h"

using namespace blocksampler;

namespace {

LatentEdges random_latent(int n, RngStream& rng) {
  LatentEdges e{FlagMatrix(n, 0), CountMatrix(n, 0)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      e.x.set(i, j, rng.uniform() < 0.4 ? 1 : 0);
      e.w.set(i, j, static_cast<Count>(rng.uniform() * 6));
    }
  }
  return e;
}

/// Direct per-block totals by enumerating pairs.
BlockStats brute_stats(const LatentEdges& e, const std::vector<int>& z, int K) {
  BlockStats s(K);
  std::vector<Count> sizes(K, 0);
  for (int v : z) ++sizes[v];
  for (int l = 0; l < K; ++l) s.set_size(l, sizes[l]);
  const int n = static_cast<int>(z.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) s.add_pair(z[i], z[j], e.x(i, j), e.w(i, j));
  }
  return s;
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("three node block statistics") {
    LatentEdges e{FlagMatrix(3, 0), CountMatrix(3, 0)};
    e.x.set(0, 1, 1);
    e.x.set(1, 2, 1);
    const std::vector<int> z{0, 0, 1};
    const BlockStats s = block_sufficient_stats(e.x, e.w, z, 2);
    CHECK(s.x(0, 0) == 1);
    CHECK(s.x(0, 1) == 1);
    CHECK(s.x(1, 0) == 1);
    CHECK(s.pairs(0, 0) == 1);
    CHECK(s.pairs(0, 1) == 2);
    CHECK(s.pairs(1, 1) == 0);
  }

  TEST_CASE("one block holds every pair") {
    RngStream rng(1);
    const LatentEdges e = random_latent(7, rng);
    const BlockStats s = block_sufficient_stats(e.x, e.w, std::vector<int>(7, 0), 1);
    CHECK(s.pairs(0, 0) == 21);
  }

  TEST_CASE("statistics partition the pairs") {
    RngStream rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform() * 10);
      const int K = 1 + static_cast<int>(rng.uniform() * 4);
      std::vector<int> z(n);
      for (int& v : z) v = static_cast<int>(rng.uniform() * K);
      const LatentEdges e = random_latent(n, rng);
      const BlockStats s = block_sufficient_stats(e.x, e.w, z, K);
      CHECK(s == brute_stats(e, z, K));
      Count total_pairs = 0, total_x = 0, total_w = 0;
      for (int l = 0; l < K; ++l) {
        for (int m = l; m < K; ++m) {
          total_pairs += s.pairs(l, m);
          total_x += s.x(l, m);
          total_w += s.w(l, m);
          CHECK(s.x(l, m) <= s.pairs(l, m));
        }
      }
      Count sx = 0, sw = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          sx += e.x(i, j);
          sw += e.w(i, j);
        }
      }
      CHECK(total_pairs == n * (n - 1) / 2);
      CHECK(total_x == sx);
      CHECK(total_w == sw);
    }
  }

  TEST_CASE("leave one out and incremental moves match recounts") {
    RngStream rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 3 + static_cast<int>(rng.uniform() * 9);
      const int K = 1 + static_cast<int>(rng.uniform() * 4);
      std::vector<int> z(n);
      for (int& v : z) v = static_cast<int>(rng.uniform() * K);
      const LatentEdges e = random_latent(n, rng);
      const BlockStats full = block_sufficient_stats(e.x, e.w, z, K);
      const int i = static_cast<int>(rng.uniform() * n);

      const BlockStats loo = leave_one_out(full, i, z, e.x, e.w);
      std::vector<int> rest;
      LatentEdges sub{FlagMatrix(n - 1, 0), CountMatrix(n - 1, 0)};
      for (int a = 0, ra = 0; a < n; ++a) {
        if (a == i) continue;
        rest.push_back(z[a]);
        for (int b = a + 1, rb = ra + 1; b < n; ++b) {
          if (b == i) continue;
          sub.x.set(ra, rb, e.x(a, b));
          sub.w.set(ra, rb, e.w(a, b));
          ++rb;
        }
        ++ra;
      }
      CHECK(loo == brute_stats(sub, rest, K));

      IncrementalBlockStats inc;
      inc.rebuild(e, z, K);
      inc.remove_node(i, z, e);
      CHECK(inc.stats() == loo);
      const int c = static_cast<int>(rng.uniform() * K);
      inc.add_node(c);
      std::vector<int> moved = z;
      moved[i] = c;
      CHECK(inc.stats() == block_sufficient_stats(e.x, e.w, moved, K));
    }
  }

  TEST_CASE("singleton removal leaves its row empty") {
    RngStream rng(4);
    const LatentEdges e = random_latent(5, rng);
    const std::vector<int> z{0, 1, 1, 2, 2};
    const BlockStats loo = leave_one_out(block_sufficient_stats(e.x, e.w, z, 3), 0, z, e.x, e.w);
    for (int m = 0; m < 3; ++m) CHECK(loo.pairs(0, m) == 0);
  }

  TEST_CASE("canonical relabelling") {
    PartitionState s;
    s.z = {2, 2, 0};
    s.counts = {1, 0, 2, 0};
    s.log_s = {0.1, 0.2, 0.3, 0.4};
    const std::vector<int> perm = relabel_occupied(s);
    CHECK(s.z == std::vector<int>{0, 0, 1});
    CHECK(s.occupied() == 2);
    CHECK(perm == std::vector<int>{2, 0, 1, 3});
    CHECK(s.counts == std::vector<int>{2, 1, 0, 0});
    CHECK(s.log_s == std::vector<double>{0.3, 0.1, 0.2, 0.4});

    const std::vector<int> again = relabel_occupied(s);
    CHECK(again == std::vector<int>{0, 1, 2, 3});
    CHECK(canonical_labels(std::vector<int>{5, 5, 1, 9, 1}) == std::vector<int>{0, 0, 1, 2, 1});
  }

  TEST_CASE("relabelling preserves the likelihood") {
    RngStream rng(5);
    const int n = 9, K = 4;
    PartitionState s;
    s.z.resize(n);
    s.counts.assign(K, 0);
    for (int& v : s.z) {
      v = 1 + static_cast<int>(rng.uniform() * 3);
      ++s.counts[v];
    }
    for (int m = 0; m < K; ++m) s.log_s.push_back(rng.normal());
    ZinbBlockParams p{BlockTensor(K, 1), BlockTensor(K, 1), BlockTensor(K, 1)};
    for (int l = 0; l < K; ++l) {
      for (int m = l; m < K; ++m) {
        p.p.set_scalar(l, m, rng.uniform());
        p.psi.set_scalar(l, m, rng.uniform());
        p.r.set_scalar(l, m, 0.5 + rng.uniform());
      }
    }
    const LatentEdges e = random_latent(n, rng);
    auto log_joint = [&](const PartitionState& st, const ZinbBlockParams& q) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += st.log_s[st.z[i]];
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const int l = st.z[i], m = st.z[j];
          const double pp = q.p.scalar(l, m);
          total += e.x(i, j) ? std::log(pp) : std::log1p(-pp);
          total += std::log(q.psi.scalar(l, m)) * q.r.scalar(l, m) +
                   static_cast<double>(e.w(i, j)) * std::log1p(-q.psi.scalar(l, m));
        }
      }
      return total;
    };
    const double before = log_joint(s, p);
    const auto perm = relabel_occupied(s);
    CHECK(log_joint(s, p.permuted(perm)) == doctest::Approx(before).epsilon(1e-12));
  }

  TEST_CASE("state check catches inconsistent counts") {
    PartitionState s;
    s.z = {0, 1};
    s.counts = {1, 0};
    s.log_s = {0.0, 0.0};
    CHECK_THROWS_AS(s.check(), NumericalError);
  }
}

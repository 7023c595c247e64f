#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace blocksampler {

/// A reproducible stream of pseudo-random numbers.
///
/// The same (seed, stream) pair always yields the same sequence. Distinct
/// stream ids are seeded through std::seed_seq, so independent chains or
/// replications can share a master seed and differ only in stream id.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();

  /// Derive an independent child stream; used to hand out per-task streams.
  RngStream split(std::uint64_t child);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace blocksampler

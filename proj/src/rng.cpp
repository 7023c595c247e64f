#include "blocksampler/rng.hpp"

#include <cmath>

namespace blocksampler {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5bd1e995u};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

double RngStream::uniform() {
  // 53 random bits mapped to the midpoints of a regular grid on (0, 1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential() { return -std::log(uniform()); }

RngStream RngStream::split(std::uint64_t child) {
  const std::uint64_t mixed = engine_() ^ (child * 0x9e3779b97f4a7c15ull);
  return RngStream(mixed, child);
}

}  // namespace blocksampler

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "blocksampler/config.hpp"
#include "blocksampler/matrix.hpp"
#include "blocksampler/network.hpp"

namespace blocksampler {

/// One kept iteration. Labels are canonical (occupied components 0..k-1
/// in order of first appearance) and block tensors cover the k x k
/// occupied pairs only.
struct DrawRecord {
  int iteration = 0;
  std::vector<int> z;
  int K = 1;
  int k = 1;
  double gamma = 1.0;
  /// zinb: p, psi, r; zip: p, lambda; czinb: beta1, beta2.
  std::map<std::string, BlockTensor> blocks;
  /// Shared CZINB dispersion; zero for the other models.
  double dispersion = 0.0;
  bool gamma_accepted = false;
  int dispersion_proposed = 0;
  int dispersion_accepted = 0;
  bool k_cap_hit = false;

  const BlockTensor& block(const std::string& name) const;
  bool operator==(const DrawRecord&) const = default;
};

struct ChainMetadata {
  ModelKind model = ModelKind::zinb;
  std::uint64_t seed = 0;
  int chain = 0;
  std::string config_hash;
  int n = 0;
  int iterations = 0;
  int burn_in = 0;
  int thin = 1;
  /// Design dimension used by the links (CZINB), zero otherwise.
  int dim = 0;
  CovariateTransform transform;

  bool operator==(const ChainMetadata&) const = default;
};

struct ChainStore {
  ChainMetadata meta;
  std::vector<DrawRecord> draws;

  std::vector<std::vector<int>> partitions() const;
};

/// JSON lines: a metadata object, then one object per draw.
void write_chain(const std::filesystem::path& path, const ChainStore& chain);
ChainStore read_chain(const std::filesystem::path& path);
/// One row per draw: iteration followed by the 1-based labels.
void write_partitions_csv(const std::filesystem::path& path, const ChainStore& chain);

}  // namespace blocksampler

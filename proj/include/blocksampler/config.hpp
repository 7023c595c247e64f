#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "blocksampler/dmfm.hpp"
#include "blocksampler/zinb_kernel.hpp"
#include "blocksampler/zip_kernel.hpp"

namespace blocksampler {

enum class ModelKind { zinb, czinb, zip };

std::string model_name(ModelKind model);
/// Accepts "zinb", "czinb", "zip"; throws InputError otherwise.
ModelKind parse_model(const std::string& name);

/// Everything that changes the sampled chain apart from seed and data.
struct SamplerConfig {
  ModelKind model = ModelKind::zinb;
  int iterations = 4000;
  int burn_in = 2000;
  int thin = 1;
  /// Initial number of components, capped by n and k_max.
  int k_init = 10;
  DmfmConfig dmfm;
  ZinbPriors zinb;  ///< a_r, b_r also serve as the CZINB dispersion prior
  ZipPriors zip;
  /// CZINB coefficient prior N(0, beta_prior_scale * I).
  double beta_prior_scale = 10.0;
  double r_proposal_sd = 0.2;
  /// Robbins-Monro tuning of proposal scales during burn-in only.
  bool adapt = true;
  bool random_scan = false;
  bool check_stats = false;
  bool standardize = true;
  bool intercept = false;

  void validate() const;
  /// Number of records kept: iterations after burn-in, every thin-th one.
  int kept() const;
  /// Sorted `key = value` lines covering every field.
  std::string canonical_text() const;
  /// FNV-1a 64-bit hash of canonical_text(), as 16 hex digits.
  std::string hash() const;
};

struct RunConfig {
  SamplerConfig sampler;
  std::uint64_t seed = 1;
  int chains = 1;
  int jobs = 1;
  std::string adjacency;
  std::string covariates;
  std::string output = "out";
  int replications = 10;
  int n = 100;
  double mask_fraction = 0.2;
  double level = 0.95;

  void validate() const;
};

/// Sets one key. Throws InputError for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped,
/// quoted strings are unquoted.
std::vector<std::pair<std::string, std::string>> read_settings(const std::filesystem::path& path);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

std::uint64_t fnv1a(const std::string& text);

}  // namespace blocksampler

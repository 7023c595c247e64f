#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "blocksampler/config.hpp"
#include "blocksampler/network.hpp"
#include "blocksampler/predict.hpp"

namespace blocksampler {

struct SimRow {
  int scenario = 1;
  ModelKind model = ModelKind::zinb;
  int replication = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t fit_seed = 0;
  bool failed = false;
  std::string error;
  int K_hat = 0;
  double vi_truth = 0.0;
  double ball_radius = 0.0;
};

struct SimAggregate {
  int scenario = 1;
  ModelKind model = ModelKind::zinb;
  int runs = 0;
  int failed = 0;
  double K_hat_mean = 0.0;
  double K_hat_sd = 0.0;
  double vi_mean = 0.0;
  double vi_sd = 0.0;
  double radius_mean = 0.0;
  double radius_sd = 0.0;
  /// Replications with K_hat = 3 and VI to the truth <= 0.05.
  int recovered = 0;
};

/// Simulation study: for each scenario and replication one network is
/// generated (cfg.n nodes) and every model is fitted to it. Tasks run on
/// cfg.jobs threads; rows come back ordered by (scenario, replication, model).
std::vector<SimRow> reproduce_sim(const RunConfig& cfg, const std::vector<int>& scenarios,
                                  const std::vector<ModelKind>& models);
std::vector<SimAggregate> aggregate_sim(const std::vector<SimRow>& rows);
void write_sim_rows_csv(const std::filesystem::path& path, const std::vector<SimRow>& rows);
std::string format_sim_table(const std::vector<SimAggregate>& table);

/// Synthetic covariate network used when no real data are supplied: two
/// blocks, three covariates plus intercept, covariate effects on both links.
CzinbNetworkSpec default_linkpred_spec();

/// CZINB (with covariates) and ZINB (without) on identical masks.
std::vector<LinkpredReport> reproduce_linkpred(const AdjacencyMatrix& a, const CovariateTensor& covariates,
                                               const RunConfig& cfg);
void write_linkpred_rows_csv(const std::filesystem::path& path, const std::vector<LinkpredReport>& reports);
std::string format_linkpred_table(const std::vector<LinkpredReport>& reports);

}  // namespace blocksampler

#include "blocksampler/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "blocksampler/error.hpp"
#include "blocksampler/fit.hpp"
#include "blocksampler/parallel.hpp"
#include "blocksampler/summary.hpp"

namespace blocksampler {

namespace {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

std::string display_name(ModelKind model) {
  switch (model) {
    case ModelKind::zinb: return "ZINB-SBM";
    case ModelKind::czinb: return "CZINB-SBM";
    case ModelKind::zip: return "ZIP-SBM";
  }
  return "";
}

std::string fmt(const char* pattern, double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

std::vector<SimRow> reproduce_sim(const RunConfig& cfg, const std::vector<int>& scenarios,
                                  const std::vector<ModelKind>& models) {
  cfg.validate();
  std::vector<SimRow> rows;
  for (int s : scenarios) {
    for (int rep = 0; rep < cfg.replications; ++rep) {
      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        SimRow row;
        row.scenario = s;
        row.model = models[mi];
        row.replication = rep;
        row.data_seed = replication_seed(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(s), rep);
        row.fit_seed = replication_seed(row.data_seed, static_cast<int>(mi) + 1);
        rows.push_back(row);
      }
    }
  }
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t t) {
    SimRow& row = rows[t];
    const auto [a, truth] = generate_scenario(row.scenario, cfg.n, row.data_seed);
    SamplerConfig sampler = cfg.sampler;
    sampler.model = row.model;
    try {
      const FitResult fit = fit_model(a, nullptr, sampler, row.fit_seed, 0);
      const ClusterSummary summary = summarize_partitions(fit.chain.partitions(), cfg.level, &truth.z);
      row.K_hat = summary.K_hat;
      row.vi_truth = *summary.vi_to_truth;
      row.ball_radius = summary.ball_radius;
    } catch (const NumericalError& e) {
      row.failed = true;
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<SimAggregate> aggregate_sim(const std::vector<SimRow>& rows) {
  std::vector<SimAggregate> out;
  for (const auto& row : rows) {
    bool seen = false;
    for (const auto& agg : out) seen = seen || (agg.scenario == row.scenario && agg.model == row.model);
    if (seen) continue;
    SimAggregate agg;
    agg.scenario = row.scenario;
    agg.model = row.model;
    std::vector<double> k, vi, radius;
    for (const auto& r : rows) {
      if (r.scenario != row.scenario || r.model != row.model) continue;
      ++agg.runs;
      if (r.failed) {
        ++agg.failed;
        continue;
      }
      k.push_back(r.K_hat);
      vi.push_back(r.vi_truth);
      radius.push_back(r.ball_radius);
      if (r.K_hat == 3 && r.vi_truth <= 0.05) ++agg.recovered;
    }
    const MeanSd km = mean_sd(k), vm = mean_sd(vi), rm = mean_sd(radius);
    agg.K_hat_mean = km.mean;
    agg.K_hat_sd = km.sd;
    agg.vi_mean = vm.mean;
    agg.vi_sd = vm.sd;
    agg.radius_mean = rm.mean;
    agg.radius_sd = rm.sd;
    out.push_back(agg);
  }
  return out;
}

void write_sim_rows_csv(const std::filesystem::path& path, const std::vector<SimRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  out << "scenario,model,replication,data_seed,fit_seed,failed,K_hat,vi_truth,ball_radius\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << model_name(r.model) << ',' << r.replication + 1 << ',' << r.data_seed << ','
        << r.fit_seed << ',' << (r.failed ? 1 : 0) << ',' << r.K_hat << ',' << r.vi_truth << ',' << r.ball_radius
        << '\n';
  }
}

std::string format_sim_table(const std::vector<SimAggregate>& table) {
  std::string out = "model       scenario  K_hat            VI(z_hat, z_true)  VI(z_hat, z_b)     failed\n";
  for (const auto& a : table) {
    char line[256];
    std::snprintf(line, sizeof line, "%-11s %-9d %-16s %-18s %-18s %d\n", display_name(a.model).c_str(), a.scenario,
                  fmt("%.3f (%.3f)", a.K_hat_mean, a.K_hat_sd).c_str(), fmt("%.3f (%.3f)", a.vi_mean, a.vi_sd).c_str(),
                  fmt("%.3f (%.3f)", a.radius_mean, a.radius_sd).c_str(), a.failed);
    out += line;
  }
  return out;
}

CzinbNetworkSpec default_linkpred_spec() {
  CzinbNetworkSpec spec;
  spec.n = 60;
  spec.q = 3;
  spec.K = 2;
  spec.intercept = true;
  spec.r = 2.0;
  spec.beta1 = BlockTensor(2, 4);
  spec.beta2 = BlockTensor(2, 4);
  const std::vector<double> nb_within_a{-1.5, 0.5, 0.0, 0.0};
  const std::vector<double> nb_within_b{-1.0, 0.5, 0.0, 0.0};
  const std::vector<double> nb_between{-0.5, 0.5, 0.0, 0.0};
  const std::vector<double> zi_within{-3.0, 0.0, 5.0, 0.0};
  const std::vector<double> zi_between{3.0, 0.0, 5.0, 0.0};
  spec.beta1.set(0, 0, nb_within_a);
  spec.beta1.set(1, 1, nb_within_b);
  spec.beta1.set(0, 1, nb_between);
  spec.beta2.set(0, 0, zi_within);
  spec.beta2.set(1, 1, zi_within);
  spec.beta2.set(0, 1, zi_between);
  return spec;
}

std::vector<LinkpredReport> reproduce_linkpred(const AdjacencyMatrix& a, const CovariateTensor& covariates,
                                               const RunConfig& cfg) {
  cfg.validate();
  std::vector<LinkpredReport> out;
  out.push_back(run_linkpred_experiment(a, &covariates, ModelKind::czinb, cfg.replications, cfg));
  out.push_back(run_linkpred_experiment(a, nullptr, ModelKind::zinb, cfg.replications, cfg));
  return out;
}

void write_linkpred_rows_csv(const std::filesystem::path& path, const std::vector<LinkpredReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  out << "model,replication,seed,failed,auc,rmse\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.replications) {
      out << model_name(rep.model) << ',' << r.replication + 1 << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ','
          << r.auc << ',' << r.rmse << '\n';
    }
  }
}

std::string format_linkpred_table(const std::vector<LinkpredReport>& reports) {
  std::string out = "model       AUC              RMSE             failed\n";
  for (const auto& r : reports) {
    char line[160];
    std::snprintf(line, sizeof line, "%-11s %-16s %-16s %d\n", display_name(r.model).c_str(),
                  fmt("%.3f (%.3f)", r.auc_mean, r.auc_sd).c_str(), fmt("%.3f (%.3f)", r.rmse_mean, r.rmse_sd).c_str(),
                  r.failed);
    out += line;
  }
  return out;
}

}  // namespace blocksampler

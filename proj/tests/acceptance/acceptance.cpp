// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blocksampler/chain.hpp"
#include "blocksampler/czinb_kernel.hpp"
#include "blocksampler/distributions.hpp"
#include "blocksampler/experiments.hpp"
#include "blocksampler/fit.hpp"
#include "blocksampler/rng.hpp"
#include "blocksampler/summary.hpp"
#include "blocksampler/zinb_kernel.hpp"
#include "support/geweke.hpp"
#include "support/oracles.hpp"
#include "support/vi_oracle.hpp"

using namespace blocksampler;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSimSeed = 2024;
constexpr std::uint64_t kLinkpredSeed = 2024;
constexpr int kDeskNodes = 100;
constexpr int kDeskReplications = 10;
constexpr int kDeskIterations = 4000;
constexpr int kRecoveredNeeded = 9;
constexpr double kRecoveryVi = 0.05;
constexpr double kZipMinK = 5.0;
constexpr double kZipMinVi = 0.6;
constexpr double kMinAuc = 0.90;
constexpr double kMinAucGain = 0.05;
constexpr double kMomentTol = 1e-9;
constexpr long kPgDraws = 1000000;
constexpr double kPgRelTol = 0.01;
constexpr int kOracleInstances = 60;
constexpr double kOracleTol = 1e-6;
constexpr long kGewekeIterations = 100000;
constexpr double kGewekeZ = 4.0;
constexpr int kViTriples = 1000;
constexpr int kMinviChains = 300;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::vector<SimRow> g_sim_rows;

const std::vector<SimRow>& sim_rows() {
  if (g_sim_rows.empty()) {
    RunConfig cfg;
    cfg.seed = kSimSeed;
    cfg.n = kDeskNodes;
    cfg.replications = kDeskReplications;
    cfg.sampler.iterations = kDeskIterations;
    cfg.sampler.burn_in = kDeskIterations / 2;
    g_sim_rows = reproduce_sim(cfg, {1, 2}, {ModelKind::zinb, ModelKind::zip});
  }
  return g_sim_rows;
}

const SimAggregate& aggregate_for(const std::vector<SimAggregate>& table, int scenario, ModelKind model) {
  for (const auto& a : table) {
    if (a.scenario == scenario && a.model == model) return a;
  }
  throw std::runtime_error("missing simulation aggregate");
}

/// Replications with K_hat = 3 and VI(z_hat, z_true) <= kRecoveryVi.
int recovered(int scenario, ModelKind model) {
  int count = 0;
  for (const auto& r : sim_rows()) {
    count += r.scenario == scenario && r.model == model && !r.failed && r.K_hat == 3 && r.vi_truth <= kRecoveryVi;
  }
  return count;
}

std::string describe(const SimAggregate& a) {
  return model_name(a.model) + fmt(": K_hat %.3f (%.3f), VI %.3f (%.3f)", a.K_hat_mean, a.K_hat_sd, a.vi_mean, a.vi_sd) +
         ", recovered " + std::to_string(recovered(a.scenario, a.model)) + "/" + std::to_string(a.runs) +
         (a.failed ? ", failed " + std::to_string(a.failed) : "");
}

Outcome scenario_two_recovery() {
  const auto table = aggregate_sim(sim_rows());
  Outcome o;
  for (ModelKind m : {ModelKind::zinb, ModelKind::zip}) {
    const auto& a = aggregate_for(table, 2, m);
    o.pass = o.pass && recovered(2, m) >= kRecoveredNeeded;
    o.detail += (o.detail.empty() ? "" : "; ") + describe(a);
  }
  return o;
}

Outcome scenario_one_contrast() {
  const auto table = aggregate_sim(sim_rows());
  const auto& zinb = aggregate_for(table, 1, ModelKind::zinb);
  const auto& zip = aggregate_for(table, 1, ModelKind::zip);
  Outcome o;
  o.pass = recovered(1, ModelKind::zinb) >= kRecoveredNeeded && zip.K_hat_mean >= kZipMinK && zip.vi_mean >= kZipMinVi;
  o.detail = describe(zinb) + "; " + describe(zip) + fmt(" (need K_hat >= %.1f and VI >= %.2f)", kZipMinK, kZipMinVi);
  return o;
}

Outcome link_prediction() {
  RunConfig cfg;
  cfg.seed = kLinkpredSeed;
  cfg.replications = kDeskReplications;
  cfg.sampler.intercept = true;
  const CzinbNetwork net = generate_czinb_network(default_linkpred_spec(), cfg.seed);
  const auto reports = reproduce_linkpred(net.adjacency, net.covariates, cfg);
  const LinkpredReport& cz = reports[0];
  const LinkpredReport& plain = reports[1];
  Outcome o;
  o.pass = cz.auc_mean >= kMinAuc && cz.auc_mean - plain.auc_mean >= kMinAucGain;
  o.detail = fmt("synthetic n=60 q=3; czinb AUC %.3f RMSE %.3f; zinb AUC %.3f RMSE %.3f", cz.auc_mean, cz.rmse_mean,
                 plain.auc_mean, plain.rmse_mean) +
             ", failed " + std::to_string(cz.failed + plain.failed);
  return o;
}

Outcome moment_identities() {
  struct Case {
    double got, want;
  };
  const std::vector<Case> cases = {
      {zinb_moments({0.1, 0.1, 5.0}).mean, 40.5},   {zinb_moments({0.1, 0.1, 5.0}).variance, 587.25},
      {zinb_moments({0.7, 0.2, 3.0}).mean, 3.6},    {zinb_moments({0.7, 0.2, 3.0}).variance, 48.24},
      {zip_moments(0.1, 3.0).mean, 2.70},           {zip_moments(0.1, 3.0).variance, 3.510},
      {zip_moments(0.7, 1.5).mean, 0.45},           {zip_moments(0.7, 1.5).variance, 0.9225},
  };
  Outcome o;
  double worst = 0.0;
  for (const auto& c : cases) worst = std::max(worst, std::abs(c.got - c.want));
  o.pass = worst <= kMomentTol;
  o.detail = fmt("max abs error %.2e over 8 moments", worst);
  return o;
}

Outcome polya_gamma_means() {
  RngStream rng(31);
  Outcome o;
  double worst = 0.0;
  for (double b : {1.0, 2.5, 7.0}) {
    for (double c : {0.0, 0.5, 3.0}) {
      const double want = c == 0.0 ? b / 4.0 : b / (2.0 * c) * std::tanh(c / 2.0);
      double s = 0.0;
      for (long t = 0; t < kPgDraws; ++t) s += sample_polya_gamma(b, c, rng);
      worst = std::max(worst, std::abs(s / kPgDraws - want) / want);
    }
  }
  o.pass = worst <= kPgRelTol;
  o.detail = fmt("max relative error %.4f over 9 (b, c) settings, %.0e draws each", worst, static_cast<double>(kPgDraws));
  return o;
}

Outcome collapsed_oracles() {
  RngStream rng(41);
  double worst_zinb = 0.0, worst_czinb = 0.0;
  for (int t = 0; t < kOracleInstances; ++t) {
    const LabelInstance inst = random_label_instance(rng);
    ZinbPriors pr;
    pr.a_p = 0.5 + 2.5 * rng.uniform();
    pr.b_p = 0.5 + 2.5 * rng.uniform();
    pr.a_psi = 0.5 + 2.5 * rng.uniform();
    pr.b_psi = 0.5 + 2.5 * rng.uniform();
    BlockTensor r(inst.K, 1);
    for (int l = 0; l < inst.K; ++l) {
      for (int m = l; m < inst.K; ++m) r.set_scalar(l, m, 0.2 + 4.0 * rng.uniform());
    }
    const auto want = zinb_label_oracle(inst.node, inst.z, inst.latent, r, inst.log_s, pr);
    const auto got = collapsed_label_logweights(inst.node, inst.z, inst.latent, r, inst.log_s, pr);
    worst_zinb = std::max(worst_zinb, max_relative_probability_error(got, want));
  }
  for (int t = 0; t < kOracleInstances; ++t) {
    const LabelInstance inst = random_label_instance(rng);
    const int n = inst.n;
    const int d = 1 + static_cast<int>(rng.uniform() * 2);
    CovariateTensor y(n, d);
    PgAugmentation pg{SymmetricMatrix<double>(n, 0.0), SymmetricMatrix<double>(n, 0.0)};
    std::vector<double> v(d);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (double& x : v) x = rng.normal();
        y.set(i, j, v);
        pg.omega1.set(i, j, 0.05 + 3.0 * rng.uniform());
        pg.omega2.set(i, j, 0.05 + 0.5 * rng.uniform());
      }
    }
    const double r = 0.3 + 4.0 * rng.uniform();
    CzinbPriors pr = CzinbPriors::isotropic(d, 1.0);
    Eigen::MatrixXd A(d, d);
    for (int a = 0; a < d; ++a) {
      pr.b0[a] = 0.5 * rng.normal();
      for (int b = 0; b < d; ++b) A(a, b) = rng.normal();
    }
    pr.B0 = A * A.transpose() + (0.3 + 2.0 * rng.uniform()) * Eigen::MatrixXd::Identity(d, d);
    const auto want = czinb_label_oracle(inst.node, inst.z, y, inst.latent, pg, r, inst.log_s, pr);
    const auto got = czinb_collapsed_label_logweights(inst.node, inst.z, y, inst.latent, pg, r, inst.log_s, pr);
    worst_czinb = std::max(worst_czinb, max_relative_probability_error(got, want));
  }
  Outcome o;
  o.pass = worst_zinb <= kOracleTol && worst_czinb <= kOracleTol;
  o.detail = fmt("%.0f instances each; max relative error zinb %.2e, czinb %.2e", kOracleInstances, worst_zinb,
                 worst_czinb);
  return o;
}

Outcome getting_it_right() {
  Outcome o;
  const std::vector<std::pair<std::string, std::function<std::vector<GewekeStat>(const GewekeOptions&)>>> suites = {
      {"zinb", [](const GewekeOptions& g) { return geweke_zinb(g); }},
      {"zip", [](const GewekeOptions& g) { return geweke_zip(g); }},
      {"czinb", [](const GewekeOptions& g) { return geweke_czinb(g); }},
  };
  std::uint64_t seed = 51;
  for (const auto& [name, run] : suites) {
    GewekeOptions opt;
    opt.iterations = kGewekeIterations;
    opt.seed = seed++;
    const auto stats = run(opt);
    double worst = 0.0;
    std::string worst_name;
    for (const auto& st : stats) {
      const double z = std::isfinite(st.z) ? std::abs(st.z) : INFINITY;
      if (z >= worst) {
        worst = z;
        worst_name = st.name;
      }
    }
    o.pass = o.pass && stats.size() >= 10 && worst < kGewekeZ;
    o.detail += (o.detail.empty() ? "" : "; ") + name + ": " + std::to_string(stats.size()) + " functions, max |z| " +
                fmt("%.2f", worst) + " (" + worst_name + ")";
  }
  return o;
}

Outcome vi_machinery() {
  Outcome o;
  const std::vector<int> single{0, 1, 2, 3}, one{0, 0, 0, 0};
  const double hand = vi_distance(single, one);
  const bool hand_ok = vi_distance(single, single) == 0.0 && std::abs(hand - std::log(4.0)) < 1e-12;

  RngStream rng(61);
  auto random_partition = [&](int n) {
    const int k = 1 + static_cast<int>(rng.uniform() * n);
    std::vector<int> z(n);
    for (int& v : z) v = static_cast<int>(rng.uniform() * k);
    return z;
  };
  int metric_bad = 0;
  double brute_err = 0.0;
  for (int t = 0; t < kViTriples; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 8);
    const auto a = random_partition(n), b = random_partition(n), c = random_partition(n);
    const double ab = vi_distance(a, b);
    if (ab < 0.0 || std::abs(ab - vi_distance(b, a)) > 1e-14 || ab > vi_distance(a, c) + vi_distance(c, b) + 1e-12 ||
        vi_distance(a, a) != 0.0) {
      ++metric_bad;
    }
    brute_err = std::max(brute_err, std::abs(ab - vi_by_nodes(a, b)));
  }
  int minvi_bad = 0;
  for (int t = 0; t < kMinviChains; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform() * 7);
    const int T = 1 + static_cast<int>(rng.uniform() * 20);
    std::vector<std::vector<int>> draws;
    for (int s = 0; s < T; ++s) {
      if (s > 0 && rng.uniform() < 0.3) {
        draws.push_back(draws[static_cast<std::size_t>(rng.uniform() * s)]);
      } else {
        draws.push_back(random_partition(n));
      }
    }
    const auto got = minvi_point_estimate(draws);
    const double best = expected_vi_loss(draws[brute_force_minvi(draws)], draws);
    if (std::abs(expected_vi_loss(got, draws) - best) > 1e-12) ++minvi_bad;
  }
  o.pass = hand_ok && metric_bad == 0 && brute_err <= 1e-12 && minvi_bad == 0;
  o.detail = fmt("VI(singletons, one block) = %.9f; ", hand) + std::to_string(metric_bad) + "/" +
             std::to_string(kViTriples) + " metric violations, max brute-force gap " + fmt("%.1e", brute_err) + ", " +
             std::to_string(minvi_bad) + "/" + std::to_string(kMinviChains) + " minVI mismatches";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Everything a short run of each command writes, as one string.
std::string run_artifacts(const fs::path& dir, int jobs) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string all;
  const auto [a, truth] = generate_scenario(1, 30, 7);
  const CzinbNetwork net = generate_czinb_network(default_linkpred_spec(), 7);
  for (ModelKind m : {ModelKind::zinb, ModelKind::zip, ModelKind::czinb}) {
    SamplerConfig cfg;
    cfg.model = m;
    cfg.iterations = 150;
    cfg.burn_in = 50;
    cfg.intercept = m == ModelKind::czinb;
    const bool cz = m == ModelKind::czinb;
    const FitResult fit = fit_model(cz ? net.adjacency : a, cz ? &net.covariates : nullptr, cfg, 13, 1);
    const fs::path chain = dir / ("chain_" + model_name(m) + ".jsonl");
    write_chain(chain, fit.chain);
    write_partitions_csv(dir / ("partitions_" + model_name(m) + ".csv"), fit.chain);
    const ClusterSummary s = summarize_partitions(fit.chain.partitions(), 0.95, cz ? &net.truth.z : &truth.z);
    all += slurp(chain) + slurp(dir / ("partitions_" + model_name(m) + ".csv"));
    all += fmt("%.17g %.17g\n", s.ball_radius, *s.vi_to_truth);
  }
  RunConfig run;
  run.seed = 17;
  run.jobs = jobs;
  run.n = 30;
  run.replications = 2;
  run.sampler.iterations = 100;
  run.sampler.burn_in = 50;
  const auto rows = reproduce_sim(run, {1, 2}, {ModelKind::zinb, ModelKind::zip});
  write_sim_rows_csv(dir / "sim.csv", rows);
  all += slurp(dir / "sim.csv") + format_sim_table(aggregate_sim(rows));
  run.sampler.intercept = true;
  const auto lp = reproduce_linkpred(net.adjacency, net.covariates, run);
  write_linkpred_rows_csv(dir / "linkpred.csv", lp);
  all += slurp(dir / "linkpred.csv") + format_linkpred_table(lp);
  return all;
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "blocksampler_acceptance";
  const std::string first = run_artifacts(base / "a", 1);
  const std::string second = run_artifacts(base / "b", 1);
  const std::string threaded = run_artifacts(base / "c", 2);
  Outcome o;
  o.pass = !first.empty() && first == second && first == threaded;
  o.detail = std::to_string(first.size()) + " bytes of chains and reports; repeat " +
             (first == second ? "identical" : "DIFFERENT") + ", two worker threads " +
             (first == threaded ? "identical" : "DIFFERENT");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"scenario-2 recovery", scenario_two_recovery},
      {"scenario-1 contrast", scenario_one_contrast},
      {"link prediction", link_prediction},
      {"moment identities", moment_identities},
      {"Polya-Gamma means", polya_gamma_means},
      {"collapsed label oracles", collapsed_oracles},
      {"getting it right", getting_it_right},
      {"VI machinery", vi_machinery},
      {"determinism", determinism},
  };
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));

  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[c].first << "): " << o.detail
              << fmt(" [%.0fs]", secs) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "blocksampler/chain.hpp"
#include "blocksampler/config.hpp"
#include "blocksampler/error.hpp"
#include "blocksampler/experiments.hpp"
#include "blocksampler/fit.hpp"
#include "blocksampler/network.hpp"
#include "blocksampler/parallel.hpp"
#include "blocksampler/predict.hpp"
#include "blocksampler/summary.hpp"

namespace fs = std::filesystem;
using namespace blocksampler;

namespace {

// Settings shared by the sampling subcommands; empty optionals leave the
// config-file or default value alone.
struct CommonFlags {
  std::string config;
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> iterations;
  std::optional<int> burn_in;
  std::optional<int> thin;
  std::vector<std::string> settings;
  bool intercept = false;
  bool dry_run = false;
  std::string output;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool sampling) {
  cmd->add_option("--config", f.config, "key = value settings file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (falls back to BLOCKSAMPLER_SEED)");
  cmd->add_option("--jobs", f.jobs, "worker threads");
  cmd->add_option("--output", f.output, "output directory");
  if (!sampling) return;
  cmd->add_option("--model", f.model, "zinb, czinb or zip");
  cmd->add_option("--iterations", f.iterations, "total sweeps");
  cmd->add_option("--burn-in", f.burn_in, "sweeps discarded before recording");
  cmd->add_option("--thin", f.thin, "keep every thin-th sweep");
  cmd->add_option("--set", f.settings, "extra key=value override (repeatable)");
  cmd->add_flag("--intercept", f.intercept, "append an intercept column to the covariates");
  cmd->add_flag("--dry-run", f.dry_run, "validate config and data, then stop");
}

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg;
  if (const char* env = std::getenv("BLOCKSAMPLER_SEED")) apply_setting(cfg, "seed", env);
  if (!f.config.empty()) apply_config_file(cfg, f.config);
  if (f.model) cfg.sampler.model = parse_model(*f.model);
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.iterations) cfg.sampler.iterations = *f.iterations;
  if (f.burn_in) cfg.sampler.burn_in = *f.burn_in;
  if (f.thin) cfg.sampler.thin = *f.thin;
  if (f.intercept) cfg.sampler.intercept = true;
  if (!f.output.empty()) cfg.output = f.output;
  for (const auto& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string chain_file(const fs::path& dir, int c) { return (dir / ("chain_" + std::to_string(c + 1) + ".jsonl")).string(); }

int cmd_generate(const std::string& scenario, int n, std::uint64_t seed, const std::string& output, double mask_fraction) {
  const fs::path dir = output.empty() ? fs::path(".") : fs::path(output);
  fs::create_directories(dir);
  AdjacencyMatrix a;
  if (scenario == "czinb") {
    CzinbNetworkSpec spec = default_linkpred_spec();
    spec.n = n;
    const CzinbNetwork net = generate_czinb_network(spec, seed);
    a = net.adjacency;
    write_covariates(dir / "covariates.csv", net.covariates);
    write_labels(dir / "truth.csv", net.truth.z);
  } else {
    int s = 0;
    try {
      s = std::stoi(scenario);
    } catch (const std::exception&) {
      throw InputError("unknown scenario '" + scenario + "'");
    }
    auto [adj, truth] = generate_scenario(s, n, seed);
    a = std::move(adj);
    write_labels(dir / "truth.csv", truth.z);
  }
  write_edge_list(dir / "adjacency.csv", a);
  std::cout << "wrote " << (dir / "adjacency.csv").string() << " (" << a.size() << " nodes, " << a.nonzero_pairs()
            << " nonzero pairs)\n";
  if (mask_fraction > 0.0) {
    const auto [train, mask] = mask_nonzero(a, mask_fraction, seed);
    write_edge_list(dir / "train.csv", train);
    write_mask(dir / "mask.csv", mask);
    std::cout << "masked " << mask.size() << " pairs into " << (dir / "train.csv").string() << "\n";
  }
  return 0;
}

int cmd_fit(const CommonFlags& flags, const std::string& adjacency, const std::string& covariates, int chains) {
  RunConfig cfg = resolve_config(flags);
  if (!adjacency.empty()) cfg.adjacency = adjacency;
  if (!covariates.empty()) cfg.covariates = covariates;
  if (chains > 0) cfg.chains = chains;
  cfg.validate();
  if (cfg.adjacency.empty()) throw InputError("an adjacency file is required (--adjacency)");
  const AdjacencyMatrix a = load_adjacency(cfg.adjacency);
  std::optional<CovariateTensor> y;
  if (cfg.sampler.model == ModelKind::czinb) {
    if (cfg.covariates.empty()) throw InputError("covariates required for the czinb model (--covariates)");
    y = load_covariates(cfg.covariates, a.size());
  }
  if (flags.dry_run) {
    std::cout << "config ok (hash " << cfg.sampler.hash() << "), " << a.size() << " nodes, " << a.nonzero_pairs()
              << " nonzero pairs\n";
    return 0;
  }
  const fs::path dir = cfg.output;
  fs::create_directories(dir);
  std::vector<FitResult> results(cfg.chains);
  parallel_for(static_cast<std::size_t>(cfg.chains), cfg.jobs, [&](std::size_t c) {
    results[c] = fit_model(a, y ? &*y : nullptr, cfg.sampler, cfg.seed, static_cast<int>(c));
  });
  for (int c = 0; c < cfg.chains; ++c) {
    const auto& r = results[c];
    write_chain(chain_file(dir, c), r.chain);
    write_partitions_csv(dir / ("partitions_" + std::to_string(c + 1) + ".csv"), r.chain);
    std::vector<int> k_trace;
    for (const auto& d : r.chain.draws) k_trace.push_back(d.k);
    std::vector<int> freq;
    for (int k : k_trace) {
      if (k >= static_cast<int>(freq.size())) freq.resize(k + 1, 0);
      ++freq[k];
    }
    std::cout << "chain " << c + 1 << ": " << r.chain.draws.size() << " draws, gamma acceptance "
              << r.summary.gamma_acceptance;
    if (cfg.sampler.model != ModelKind::zip) std::cout << ", r acceptance " << r.summary.dispersion_acceptance;
    std::cout << ", K cap hits " << r.summary.k_cap_hits << "\n  occupied components:";
    for (std::size_t k = 0; k < freq.size(); ++k) {
      if (freq[k] > 0) std::cout << " k=" << k << " (" << freq[k] << ")";
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_summarize(const std::vector<std::string>& chain_paths, const std::string& truth_path, double level,
                  const std::string& output) {
  ChainStore merged;
  for (std::size_t c = 0; c < chain_paths.size(); ++c) {
    ChainStore chain = read_chain(chain_paths[c]);
    if (c == 0) {
      merged.meta = chain.meta;
    } else if (chain.meta.n != merged.meta.n || chain.meta.model != merged.meta.model) {
      throw InputError("chains differ in model or node count");
    }
    for (auto& d : chain.draws) merged.draws.push_back(std::move(d));
  }
  std::optional<std::vector<int>> truth;
  if (!truth_path.empty()) truth = load_labels(truth_path);
  const ClusterSummary s = summarize_partitions(merged.partitions(), level, truth ? &*truth : nullptr);
  const fs::path dir = output.empty() ? fs::path(".") : fs::path(output);
  fs::create_directories(dir);
  write_labels(dir / "z_hat.csv", s.z_hat);
  std::string text = "model " + model_name(merged.meta.model) + "\ndraws " + std::to_string(merged.draws.size()) +
                     "\nK_hat " + std::to_string(s.K_hat) + "\nball_radius " + std::to_string(s.ball_radius) + "\n";
  if (s.vi_to_truth) text += "vi_to_truth " + std::to_string(*s.vi_to_truth) + "\n";
  write_text(dir / "summary.txt", text);
  std::cout << text;
  if (merged.meta.model == ModelKind::czinb) {
    std::ofstream out(dir / "coefficients.csv", std::ios::binary);
    out.precision(10);
    out << "block_l,block_m,link,coordinate,mean,lower,upper,draws\n";
    for (int l = 0; l < s.K_hat; ++l) {
      for (int m = l; m < s.K_hat; ++m) {
        for (int link = 1; link <= 2; ++link) {
          const CoefficientSummary cs = summarize_coefficients(merged, s.z_hat, l, m, link);
          for (std::size_t c = 0; c < cs.mean.size(); ++c) {
            out << l + 1 << ',' << m + 1 << ',' << link << ',' << c + 1 << ',' << cs.mean[c] << ',' << cs.lower[c]
                << ',' << cs.upper[c] << ',' << cs.draws_used << '\n';
          }
        }
      }
    }
    std::cout << "coefficients written to " << (dir / "coefficients.csv").string() << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& chain_path, const std::string& mask_path, const std::string& train_path,
                const std::string& covariates_path, const std::string& output) {
  const ChainStore chain = read_chain(chain_path);
  std::optional<CovariateTensor> y;
  if (!covariates_path.empty()) y = load_covariates(covariates_path, chain.meta.n);
  const MaskSet mask = load_mask(mask_path);
  const fs::path dir = output.empty() ? fs::path(".") : fs::path(output);
  fs::create_directories(dir);
  std::vector<std::pair<int, int>> pairs = mask.pairs;
  std::vector<int> labels;
  if (!train_path.empty()) {
    const AdjacencyMatrix original = unmask(load_adjacency(train_path, chain.meta.n), mask);
    const EvaluationSet eval = evaluation_set(original, mask);
    pairs = eval.pairs;
    labels = eval.labels;
  }
  const PredictiveScores scores = predictive_scores(chain, pairs, y ? &*y : nullptr);
  write_scores_csv(dir / "scores.csv", pairs, scores);
  const std::vector<double> predicted(scores.expected_weight.begin(),
                                      scores.expected_weight.begin() + static_cast<std::ptrdiff_t>(mask.size()));
  const std::vector<double> truth(mask.original.begin(), mask.original.end());
  std::string text = "masked_pairs " + std::to_string(mask.size()) + "\nrmse " + std::to_string(rmse(predicted, truth)) + "\n";
  if (!labels.empty()) text += "auc " + std::to_string(auc(scores.prob_nonzero, labels)) + "\n";
  write_text(dir / "predict.txt", text);
  std::cout << text;
  return 0;
}

int cmd_reproduce_sim(const CommonFlags& flags, bool full, std::optional<int> replications, std::optional<int> n,
                      const std::vector<int>& scenarios) {
  RunConfig cfg = resolve_config(flags);
  if (full) {
    cfg.n = 150;
    cfg.replications = 50;
  }
  if (replications) cfg.replications = *replications;
  if (n) cfg.n = *n;
  cfg.validate();
  const std::vector<int> which = scenarios.empty() ? std::vector<int>{1, 2} : scenarios;
  for (int s : which) {
    if (s != 1 && s != 2) throw InputError("unknown scenario " + std::to_string(s));
  }
  if (flags.dry_run) {
    std::cout << "config ok (hash " << cfg.sampler.hash() << "): " << which.size() << " scenarios x "
              << cfg.replications << " replications x 2 models, n = " << cfg.n << "\n";
    return 0;
  }
  const auto rows = reproduce_sim(cfg, which, {ModelKind::zinb, ModelKind::zip});
  const std::string table = format_sim_table(aggregate_sim(rows));
  const fs::path dir = cfg.output;
  fs::create_directories(dir);
  write_sim_rows_csv(dir / "sim_replications.csv", rows);
  write_text(dir / "sim_table.txt", table);
  std::cout << table;
  return 0;
}

int cmd_reproduce_linkpred(const CommonFlags& flags, bool full, std::optional<int> replications,
                           const std::string& adjacency, const std::string& covariates) {
  RunConfig cfg = resolve_config(flags);
  cfg.sampler.intercept = true;
  if (full) cfg.replications = 50;
  if (replications) cfg.replications = *replications;
  if (!adjacency.empty()) cfg.adjacency = adjacency;
  if (!covariates.empty()) cfg.covariates = covariates;
  cfg.validate();
  AdjacencyMatrix a;
  CovariateTensor y;
  std::string source;
  if (!cfg.adjacency.empty()) {
    if (cfg.covariates.empty()) throw InputError("covariates required alongside --adjacency");
    a = load_adjacency(cfg.adjacency);
    y = load_covariates(cfg.covariates, a.size());
    source = cfg.adjacency;
  } else {
    const CzinbNetwork net = generate_czinb_network(default_linkpred_spec(), cfg.seed);
    a = net.adjacency;
    y = net.covariates;
    source = "synthetic covariate network (n = 60, q = 3)";
  }
  if (flags.dry_run) {
    std::cout << "config ok (hash " << cfg.sampler.hash() << "): " << source << ", " << cfg.replications
              << " replications\n";
    return 0;
  }
  const auto reports = reproduce_linkpred(a, y, cfg);
  const std::string table = "data: " + source + "\n" + format_linkpred_table(reports);
  const fs::path dir = cfg.output;
  fs::create_directories(dir);
  write_linkpred_rows_csv(dir / "linkpred_replications.csv", reports);
  write_text(dir / "linkpred_table.txt", table);
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian zero-inflated stochastic block models for weighted networks"};
  app.require_subcommand(1);

  std::string gen_scenario;
  int gen_n = 100;
  std::uint64_t gen_seed = 1;
  std::string gen_output;
  double gen_mask = 0.0;
  auto* gen = app.add_subcommand("generate", "simulate a network with known communities");
  gen->add_option("--scenario", gen_scenario, "1, 2 or czinb")->required();
  gen->add_option("--n", gen_n, "number of nodes")->check(CLI::PositiveNumber);
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--output", gen_output, "output directory");
  gen->add_option("--mask-fraction", gen_mask, "also write a training network with this fraction of nonzero pairs hidden");

  CommonFlags fit_flags;
  std::string fit_adjacency, fit_covariates;
  int fit_chains = 0;
  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler and write chain files");
  add_common(fit, fit_flags, true);
  fit->add_option("--adjacency", fit_adjacency, "network CSV (dense or i,j,w edge list)");
  fit->add_option("--covariates", fit_covariates, "pair covariates CSV i,j,y1,...");
  fit->add_option("--chains", fit_chains, "independent chains");

  std::vector<std::string> sum_chains;
  std::string sum_truth, sum_output;
  double sum_level = 0.95;
  auto* sum = app.add_subcommand("summarize", "point estimate, credible ball and coefficient summaries");
  sum->add_option("--chain", sum_chains, "chain file(s)")->required()->check(CLI::ExistingFile);
  sum->add_option("--truth", sum_truth, "true labels CSV node,label")->check(CLI::ExistingFile);
  sum->add_option("--level", sum_level, "credible-ball level");
  sum->add_option("--output", sum_output, "output directory");

  std::string pred_chain, pred_mask, pred_train, pred_covariates, pred_output;
  auto* pred = app.add_subcommand("predict", "posterior predictive scores for masked pairs");
  pred->add_option("--chain", pred_chain, "chain file")->required()->check(CLI::ExistingFile);
  pred->add_option("--mask", pred_mask, "mask CSV i,j,original")->required()->check(CLI::ExistingFile);
  pred->add_option("--adjacency", pred_train, "training network; enables AUC over masked and zero pairs")
      ->check(CLI::ExistingFile);
  pred->add_option("--covariates", pred_covariates, "raw pair covariates (czinb)")->check(CLI::ExistingFile);
  pred->add_option("--output", pred_output, "output directory");

  CommonFlags sim_flags;
  bool sim_full = false;
  std::optional<int> sim_reps, sim_n;
  std::vector<int> sim_scenarios;
  auto* sim = app.add_subcommand("reproduce-sim", "simulation study for both count kernels");
  add_common(sim, sim_flags, true);
  sim->add_flag("--full", sim_full, "n = 150 and 50 replications");
  sim->add_option("--replications", sim_reps, "replications per scenario");
  sim->add_option("--n", sim_n, "nodes per network");
  sim->add_option("--scenario", sim_scenarios, "scenarios to run (default 1 and 2)");

  CommonFlags lp_flags;
  bool lp_full = false;
  std::optional<int> lp_reps;
  std::string lp_adjacency, lp_covariates;
  auto* lp = app.add_subcommand("reproduce-linkpred", "missing-link experiment, covariate vs plain ZINB");
  add_common(lp, lp_flags, true);
  lp->add_flag("--full", lp_full, "50 replications");
  lp->add_option("--replications", lp_reps, "replications");
  lp->add_option("--adjacency", lp_adjacency, "network CSV; synthetic data when omitted");
  lp->add_option("--covariates", lp_covariates, "pair covariates CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (gen_seed_opt->count() == 0) {
        if (const char* env = std::getenv("BLOCKSAMPLER_SEED")) gen_seed = std::stoull(env);
      }
      return cmd_generate(gen_scenario, gen_n, gen_seed, gen_output, gen_mask);
    }
    if (fit->parsed()) return cmd_fit(fit_flags, fit_adjacency, fit_covariates, fit_chains);
    if (sum->parsed()) return cmd_summarize(sum_chains, sum_truth, sum_level, sum_output);
    if (pred->parsed()) return cmd_predict(pred_chain, pred_mask, pred_train, pred_covariates, pred_output);
    if (sim->parsed()) return cmd_reproduce_sim(sim_flags, sim_full, sim_reps, sim_n, sim_scenarios);
    if (lp->parsed()) return cmd_reproduce_linkpred(lp_flags, lp_full, lp_reps, lp_adjacency, lp_covariates);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

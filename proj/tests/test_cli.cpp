#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string output;
};

/// Runs the command-line tool with stdout and stderr captured.
Run cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "blocksampler_tests" / "cli_log.txt";
  fs::create_directories(log.parent_path());
  const std::string cmd = std::string("\"") + BLOCKSAMPLER_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {raw == 0 ? 0 : 1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "blocksampler_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("command line") {
  TEST_CASE("generate") {
    const fs::path a = fresh_dir("gen_a"), b = fresh_dir("gen_b");
    Run r = cli("generate --scenario 1 --n 40 --seed 3 --output " + a.string());
    CHECK(r.status == 0);
    CHECK(fs::exists(a / "adjacency.csv"));
    CHECK(fs::exists(a / "truth.csv"));
    CHECK(cli("generate --scenario 1 --n 40 --seed 3 --output " + b.string()).status == 0);
    CHECK(slurp(a / "adjacency.csv") == slurp(b / "adjacency.csv"));

    r = cli("generate --scenario 3 --n 40 --output " + a.string());
    CHECK(r.status != 0);
    CHECK(r.output.find("unknown scenario") != std::string::npos);
    CHECK(cli("generate --n 40").status != 0);
  }

  TEST_CASE("fit, summarize and predict") {
    const fs::path data = fresh_dir("pipeline_data");
    REQUIRE(cli("generate --scenario 2 --n 30 --seed 4 --mask-fraction 0.2 --output " + data.string()).status == 0);
    const std::string common = " --iterations 60 --burn-in 20 --seed 9 --adjacency " + (data / "train.csv").string();

    const fs::path f1 = fresh_dir("fit_1"), f2 = fresh_dir("fit_2");
    Run r = cli("fit --model zip" + common + " --output " + f1.string());
    INFO(r.output);
    REQUIRE(r.status == 0);
    REQUIRE(cli("fit --model zip" + common + " --output " + f2.string()).status == 0);
    CHECK(slurp(f1 / "chain_1.jsonl") == slurp(f2 / "chain_1.jsonl"));
    CHECK(slurp(f1 / "partitions_1.csv") == slurp(f2 / "partitions_1.csv"));

    const fs::path s = fresh_dir("summary");
    r = cli("summarize --chain " + (f1 / "chain_1.jsonl").string() + " --truth " + (data / "truth.csv").string() +
            " --output " + s.string());
    CHECK(r.status == 0);
    CHECK(slurp(s / "summary.txt").find("K_hat") != std::string::npos);
    CHECK(fs::exists(s / "z_hat.csv"));

    const fs::path p = fresh_dir("predict");
    r = cli("predict --chain " + (f1 / "chain_1.jsonl").string() + " --mask " + (data / "mask.csv").string() +
            " --adjacency " + (data / "train.csv").string() + " --output " + p.string());
    CHECK(r.status == 0);
    const std::string report = slurp(p / "predict.txt");
    CHECK(report.find("rmse") != std::string::npos);
    CHECK(report.find("auc") != std::string::npos);
  }

  TEST_CASE("input errors") {
    const fs::path data = fresh_dir("errors_data");
    REQUIRE(cli("generate --scenario 1 --n 20 --seed 2 --output " + data.string()).status == 0);
    Run r = cli("fit --model czinb --iterations 10 --burn-in 2 --adjacency " + (data / "adjacency.csv").string() +
                " --output " + fresh_dir("errors_out").string());
    CHECK(r.status != 0);
    CHECK(r.output.find("covariates required") != std::string::npos);

    r = cli("fit --iterations 10 --burn-in 10 --adjacency " + (data / "adjacency.csv").string());
    CHECK(r.status != 0);
    CHECK(r.output.find("burn_in") != std::string::npos);

    r = cli("fit --set iteration=5 --adjacency " + (data / "adjacency.csv").string());
    CHECK(r.status != 0);
    CHECK(r.output.find("unknown config key") != std::string::npos);

    r = cli("fit --dry-run --adjacency " + (data / "adjacency.csv").string());
    CHECK(r.status == 0);
    CHECK(r.output.find("config ok") != std::string::npos);
  }
}

#include "blocksampler/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "blocksampler/error.hpp"

namespace blocksampler {

std::string model_name(ModelKind model) {
  switch (model) {
    case ModelKind::zinb: return "zinb";
    case ModelKind::czinb: return "czinb";
    case ModelKind::zip: return "zip";
  }
  return "zinb";
}

ModelKind parse_model(const std::string& name) {
  if (name == "zinb") return ModelKind::zinb;
  if (name == "czinb") return ModelKind::czinb;
  if (name == "zip") return ModelKind::zip;
  throw InputError("unknown model '" + name + "' (expected zinb, czinb or zip)");
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_bool(bool v) { return v ? "true" : "false"; }

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InputError("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InputError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InputError("config key '" + key + "': expected a nonnegative integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InputError("config key '" + key + "': expected true or false, got '" + value + "'");
}

struct Field {
  bool sampler;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

Field dbl(std::function<double&(RunConfig&)> ref, bool sampler = true) {
  return {sampler, [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = parse_double(k, v); }};
}

Field integer(std::function<int&(RunConfig&)> ref, bool sampler = true) {
  return {sampler, [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, const std::string& k, const std::string& v) {
            const long long x = parse_int(k, v);
            if (x < -2147483647LL || x > 2147483647LL) throw InputError("config key '" + k + "' out of range");
            ref(c) = static_cast<int>(x);
          }};
}

Field boolean(std::function<bool&(RunConfig&)> ref, bool sampler = true) {
  return {sampler, [ref](const RunConfig& c) { return format_bool(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = parse_bool(k, v); }};
}

Field text(std::function<std::string&(RunConfig&)> ref) {
  return {false, [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); },
          [ref](RunConfig& c, const std::string&, const std::string& v) { ref(c) = v; }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"model",
       {true, [](const RunConfig& c) { return model_name(c.sampler.model); },
        [](RunConfig& c, const std::string&, const std::string& v) { c.sampler.model = parse_model(v); }}},
      {"iterations", integer([](RunConfig& c) -> int& { return c.sampler.iterations; })},
      {"burn_in", integer([](RunConfig& c) -> int& { return c.sampler.burn_in; })},
      {"thin", integer([](RunConfig& c) -> int& { return c.sampler.thin; })},
      {"k_init", integer([](RunConfig& c) -> int& { return c.sampler.k_init; })},
      {"k_max", integer([](RunConfig& c) -> int& { return c.sampler.dmfm.k_max; })},
      {"fixed_k", integer([](RunConfig& c) -> int& { return c.sampler.dmfm.fixed_k; })},
      {"bnb_alpha", dbl([](RunConfig& c) -> double& { return c.sampler.dmfm.bnb_alpha; })},
      {"bnb_a", dbl([](RunConfig& c) -> double& { return c.sampler.dmfm.bnb_a; })},
      {"bnb_b", dbl([](RunConfig& c) -> double& { return c.sampler.dmfm.bnb_b; })},
      {"tail_tol", dbl([](RunConfig& c) -> double& { return c.sampler.dmfm.tail_tol; })},
      {"gamma_proposal_sd", dbl([](RunConfig& c) -> double& { return c.sampler.dmfm.gamma_proposal_sd; })},
      {"r_proposal_sd", dbl([](RunConfig& c) -> double& { return c.sampler.r_proposal_sd; })},
      {"a_p", dbl([](RunConfig& c) -> double& { return c.sampler.zinb.a_p; })},
      {"b_p", dbl([](RunConfig& c) -> double& { return c.sampler.zinb.b_p; })},
      {"a_psi", dbl([](RunConfig& c) -> double& { return c.sampler.zinb.a_psi; })},
      {"b_psi", dbl([](RunConfig& c) -> double& { return c.sampler.zinb.b_psi; })},
      {"a_r", dbl([](RunConfig& c) -> double& { return c.sampler.zinb.a_r; })},
      {"b_r", dbl([](RunConfig& c) -> double& { return c.sampler.zinb.b_r; })},
      {"zip_a_p", dbl([](RunConfig& c) -> double& { return c.sampler.zip.a_p; })},
      {"zip_b_p", dbl([](RunConfig& c) -> double& { return c.sampler.zip.b_p; })},
      {"a_lambda", dbl([](RunConfig& c) -> double& { return c.sampler.zip.a_lambda; })},
      {"b_lambda", dbl([](RunConfig& c) -> double& { return c.sampler.zip.b_lambda; })},
      {"beta_prior_scale", dbl([](RunConfig& c) -> double& { return c.sampler.beta_prior_scale; })},
      {"adapt", boolean([](RunConfig& c) -> bool& { return c.sampler.adapt; })},
      {"random_scan", boolean([](RunConfig& c) -> bool& { return c.sampler.random_scan; })},
      {"check_stats", boolean([](RunConfig& c) -> bool& { return c.sampler.check_stats; })},
      {"standardize", boolean([](RunConfig& c) -> bool& { return c.sampler.standardize; })},
      {"intercept", boolean([](RunConfig& c) -> bool& { return c.sampler.intercept; })},
      {"seed",
       {false, [](const RunConfig& c) { return std::to_string(c.seed); },
        [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_seed(k, v); }}},
      {"chains", integer([](RunConfig& c) -> int& { return c.chains; }, false)},
      {"jobs", integer([](RunConfig& c) -> int& { return c.jobs; }, false)},
      {"replications", integer([](RunConfig& c) -> int& { return c.replications; }, false)},
      {"n", integer([](RunConfig& c) -> int& { return c.n; }, false)},
      {"mask_fraction", dbl([](RunConfig& c) -> double& { return c.mask_fraction; }, false)},
      {"level", dbl([](RunConfig& c) -> double& { return c.level; }, false)},
      {"adjacency", text([](RunConfig& c) -> std::string& { return c.adjacency; })},
      {"covariates", text([](RunConfig& c) -> std::string& { return c.covariates; })},
      {"output", text([](RunConfig& c) -> std::string& { return c.output; })},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void SamplerConfig::validate() const {
  if (iterations < 1) throw InputError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw InputError("burn_in must satisfy 0 <= burn_in < iterations");
  if (thin < 1) throw InputError("thin must be at least 1");
  if (k_init < 1) throw InputError("k_init must be at least 1");
  if (!(beta_prior_scale > 0.0)) throw InputError("beta_prior_scale must be positive");
  if (!(r_proposal_sd > 0.0)) throw InputError("r_proposal_sd must be positive");
  dmfm.validate();
  zinb.validate();
  zip.validate();
}

int SamplerConfig::kept() const { return (iterations - burn_in + thin - 1) / thin; }

std::string SamplerConfig::canonical_text() const {
  RunConfig wrapper;
  wrapper.sampler = *this;
  std::string out;
  for (const auto& [key, field] : fields()) {
    if (field.sampler) out += key + " = " + field.get(wrapper) + "\n";
  }
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string SamplerConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_text())));
  return buf;
}

void RunConfig::validate() const {
  sampler.validate();
  if (chains < 1) throw InputError("chains must be at least 1");
  if (jobs < 1) throw InputError("jobs must be at least 1");
  if (replications < 1) throw InputError("replications must be at least 1");
  if (n < 2) throw InputError("n must be at least 2");
  if (!(mask_fraction >= 0.0 && mask_fraction < 1.0)) throw InputError("mask_fraction must lie in [0, 1)");
  if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0, 1)");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw InputError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

std::vector<std::pair<std::string, std::string>> read_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  for (const auto& [key, value] : read_settings(path)) apply_setting(cfg, key, value);
}

}  // namespace blocksampler

#include "blocksampler/chain.hpp"

#include <fstream>

#include "json.hpp"

#include "blocksampler/error.hpp"

namespace blocksampler {

using nlohmann::json;

const BlockTensor& DrawRecord::block(const std::string& name) const {
  const auto it = blocks.find(name);
  if (it == blocks.end()) throw InputError("draw has no block parameter '" + name + "'");
  return it->second;
}

std::vector<std::vector<int>> ChainStore::partitions() const {
  std::vector<std::vector<int>> out;
  out.reserve(draws.size());
  for (const auto& d : draws) out.push_back(d.z);
  return out;
}

namespace {

json tensor_to_json(const BlockTensor& t) {
  return json{{"K", t.blocks()}, {"dim", t.dim()}, {"values", t.raw()}};
}

BlockTensor tensor_from_json(const json& j) {
  const int K = j.at("K").get<int>();
  const int dim = j.at("dim").get<int>();
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != static_cast<std::size_t>(K) * K * dim) throw InputError("block tensor has the wrong length");
  BlockTensor out(K, dim);
  for (int l = 0; l < K; ++l) {
    for (int m = l; m < K; ++m) {
      out.set(l, m, std::span<const double>(values.data() + (static_cast<std::size_t>(l) * K + m) * dim, dim));
    }
  }
  return out;
}

json meta_to_json(const ChainMetadata& m) {
  return json{{"type", "metadata"},
              {"model", model_name(m.model)},
              {"seed", m.seed},
              {"chain", m.chain},
              {"config_hash", m.config_hash},
              {"n", m.n},
              {"iterations", m.iterations},
              {"burn_in", m.burn_in},
              {"thin", m.thin},
              {"dim", m.dim},
              {"transform",
               {{"mean", m.transform.mean},
                {"sd", m.transform.sd},
                {"standardized", m.transform.standardized},
                {"intercept", m.transform.intercept}}}};
}

ChainMetadata meta_from_json(const json& j) {
  ChainMetadata m;
  m.model = parse_model(j.at("model").get<std::string>());
  m.seed = j.at("seed").get<std::uint64_t>();
  m.chain = j.at("chain").get<int>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.n = j.at("n").get<int>();
  m.iterations = j.at("iterations").get<int>();
  m.burn_in = j.at("burn_in").get<int>();
  m.thin = j.at("thin").get<int>();
  m.dim = j.at("dim").get<int>();
  const auto& t = j.at("transform");
  m.transform.mean = t.at("mean").get<std::vector<double>>();
  m.transform.sd = t.at("sd").get<std::vector<double>>();
  m.transform.standardized = t.at("standardized").get<bool>();
  m.transform.intercept = t.at("intercept").get<bool>();
  return m;
}

json draw_to_json(const DrawRecord& d) {
  json blocks = json::object();
  for (const auto& [name, t] : d.blocks) blocks[name] = tensor_to_json(t);
  return json{{"iteration", d.iteration},
              {"z", d.z},
              {"K", d.K},
              {"k", d.k},
              {"gamma", d.gamma},
              {"blocks", blocks},
              {"dispersion", d.dispersion},
              {"gamma_accepted", d.gamma_accepted},
              {"dispersion_proposed", d.dispersion_proposed},
              {"dispersion_accepted", d.dispersion_accepted},
              {"k_cap_hit", d.k_cap_hit}};
}

DrawRecord draw_from_json(const json& j) {
  DrawRecord d;
  d.iteration = j.at("iteration").get<int>();
  d.z = j.at("z").get<std::vector<int>>();
  d.K = j.at("K").get<int>();
  d.k = j.at("k").get<int>();
  d.gamma = j.at("gamma").get<double>();
  for (const auto& [name, t] : j.at("blocks").items()) d.blocks.emplace(name, tensor_from_json(t));
  d.dispersion = j.at("dispersion").get<double>();
  d.gamma_accepted = j.at("gamma_accepted").get<bool>();
  d.dispersion_proposed = j.at("dispersion_proposed").get<int>();
  d.dispersion_accepted = j.at("dispersion_accepted").get<int>();
  d.k_cap_hit = j.at("k_cap_hit").get<bool>();
  return d;
}

}  // namespace

void write_chain(const std::filesystem::path& path, const ChainStore& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write chain file " + path.string());
  out << meta_to_json(chain.meta).dump() << '\n';
  for (const auto& d : chain.draws) out << draw_to_json(d).dump() << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

ChainStore read_chain(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open chain file " + path.string());
  ChainStore chain;
  std::string line;
  int lineno = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_meta) {
        if (j.value("type", "") != "metadata") throw InputError("first line is not chain metadata");
        chain.meta = meta_from_json(j);
        have_meta = true;
      } else {
        chain.draws.push_back(draw_from_json(j));
      }
    } catch (const json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_meta) throw InputError("chain file " + path.string() + " is empty");
  return chain;
}

void write_partitions_csv(const std::filesystem::path& path, const ChainStore& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "iteration";
  for (int i = 1; i <= chain.meta.n; ++i) out << ",node" << i;
  out << '\n';
  for (const auto& d : chain.draws) {
    out << d.iteration;
    for (int label : d.z) out << ',' << label + 1;
    out << '\n';
  }
}

}  // namespace blocksampler

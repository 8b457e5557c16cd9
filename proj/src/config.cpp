#include "sparse_si/config.hpp"

#include "toml.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace sparse_si {

namespace {

using nlohmann::json;

json node_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = node_to_json(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(node_to_json(value));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw std::invalid_argument("unsupported TOML value type (dates and times are not accepted)");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be a table");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("key '" + key + "' in " + where + " has the wrong type");
  }
}

std::uint64_t get_seed(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  // TOML integers are signed 64-bit; larger seeds can be given as strings.
  if (v.is_string()) return std::stoull(v.get<std::string>());
  throw std::invalid_argument("key '" + key + "' in " + where + " must be a nonnegative integer");
}

}  // namespace

GibbsConfig gibbs_from_json(const json& j, GibbsConfig cfg) {
  const std::string where = "[gibbs]";
  check_keys(j, {"lambda", "C", "s", "delta", "steps", "chains", "seed", "warm_start", "average_tail", "threads"},
             where);
  if (j.contains("lambda") && !j["lambda"].is_null()) cfg.lambda = get<double>(j, "lambda", where);
  if (j.contains("C")) cfg.C = get<double>(j, "C", where);
  if (j.contains("s")) cfg.s = get<double>(j, "s", where);
  if (j.contains("delta")) cfg.delta = get<double>(j, "delta", where);
  if (j.contains("steps") && !j["steps"].is_null()) cfg.steps = get<int>(j, "steps", where);
  if (j.contains("chains")) cfg.chains = get<int>(j, "chains", where);
  if (j.contains("seed")) cfg.seed = get_seed(j, "seed", where);
  if (j.contains("warm_start") && !j["warm_start"].is_null()) {
    cfg.warm_start = warm_start_from_string(get<std::string>(j, "warm_start", where));
  }
  if (j.contains("average_tail")) cfg.average_tail = get<bool>(j, "average_tail", where);
  if (j.contains("threads")) cfg.threads = get<int>(j, "threads", where);
  cfg.validate();
  return cfg;
}

json to_json(const GibbsConfig& cfg) {
  json j;
  j["lambda"] = cfg.lambda ? json(*cfg.lambda) : json(nullptr);
  j["C"] = cfg.C;
  j["s"] = cfg.s;
  j["delta"] = cfg.delta;
  j["steps"] = cfg.steps ? json(*cfg.steps) : json(nullptr);
  j["chains"] = cfg.chains;
  j["seed"] = cfg.seed;
  j["warm_start"] = cfg.warm_start ? json(to_string(*cfg.warm_start)) : json(nullptr);
  j["average_tail"] = cfg.average_tail;
  return j;
}

json to_json(const SyntheticSpec& spec) {
  return {{"model", to_string(spec.model)}, {"n", spec.n}, {"p", spec.p}, {"sigma", spec.sigma}, {"seed", spec.seed}};
}

json to_json(const ExperimentSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["repetitions"] = spec.repetitions;
  j["seed"] = spec.seed;
  json methods = json::array();
  for (Method m : spec.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  if (const auto* syn = std::get_if<SyntheticSpec>(&spec.source)) {
    json s = to_json(*syn);
    s.erase("seed");
    j["synthetic"] = s;
  } else {
    const auto& csv = std::get<CsvSource>(spec.source);
    j["dataset"] = {{"path", csv.path},
                    {"target", csv.target},
                    {"augment", csv.augment},
                    {"augment_factor", csv.augment_factor}};
  }
  j["gibbs"] = to_json(spec.gibbs);
  return j;
}

ExperimentSpec parse_experiment_toml(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = node_to_json(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
    throw std::invalid_argument(msg.str());
  }
  const std::string where = "experiment config";
  check_keys(j, {"name", "repetitions", "seed", "methods", "synthetic", "dataset", "gibbs"}, where);

  ExperimentSpec spec;
  if (j.contains("name")) spec.name = get<std::string>(j, "name", where);
  if (j.contains("repetitions")) spec.repetitions = get<int>(j, "repetitions", where);
  if (j.contains("seed")) spec.seed = get_seed(j, "seed", where);
  if (j.contains("methods")) {
    spec.methods.clear();
    for (const auto& m : j["methods"]) {
      if (!m.is_string()) throw std::invalid_argument("methods must be a list of strings");
      spec.methods.push_back(method_from_string(m.get<std::string>()));
    }
  }
  if (j.contains("synthetic") == j.contains("dataset")) {
    throw std::invalid_argument("config needs exactly one of [synthetic] or [dataset]");
  }
  if (j.contains("synthetic")) {
    const json& s = j["synthetic"];
    check_keys(s, {"model", "n", "p", "sigma"}, "[synthetic]");
    SyntheticSpec syn;
    if (s.contains("model")) syn.model = synthetic_model_from_string(get<std::string>(s, "model", "[synthetic]"));
    if (s.contains("n")) syn.n = get<long>(s, "n", "[synthetic]");
    if (s.contains("p")) syn.p = get<long>(s, "p", "[synthetic]");
    if (s.contains("sigma")) syn.sigma = get<double>(s, "sigma", "[synthetic]");
    spec.source = syn;
  } else {
    const json& d = j["dataset"];
    check_keys(d, {"path", "target", "augment", "augment_factor"}, "[dataset]");
    CsvSource csv;
    csv.path = get<std::string>(d, "path", "[dataset]");
    if (std::filesystem::path(csv.path).is_relative()) {
      csv.path = (std::filesystem::path(base_dir) / csv.path).lexically_normal().string();
    }
    if (d.contains("target")) csv.target = get<std::string>(d, "target", "[dataset]");
    if (d.contains("augment")) csv.augment = get<bool>(d, "augment", "[dataset]");
    if (d.contains("augment_factor")) csv.augment_factor = get<int>(d, "augment_factor", "[dataset]");
    spec.source = csv;
  }
  if (j.contains("gibbs")) spec.gibbs = gibbs_from_json(j["gibbs"]);
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_experiment_toml(buf.str(), dir.empty() ? "." : dir.string());
}

}  // namespace sparse_si

#include "sparse_si/model_io.hpp"

#include "sparse_si/config.hpp"

#include <fstream>
#include <sstream>

namespace sparse_si {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return out;
}

json state_json(const ModelState& s) {
  json support = json::array();
  for (int j : s.index.support()) support.push_back(j);
  return {{"index", vector_json(s.index.values())},
          {"support", support},
          {"beta", vector_json(s.link.beta)},
          {"m", s.link.m()},
          {"risk", s.risk}};
}

ModelState state_from(const json& j) {
  ModelState s;
  s.index = IndexVector::from_values(vector_from(j.at("index")));
  s.link = LinkCoeffs{vector_from(j.at("beta"))};
  if (s.link.m() < 1) throw DataError("model link has no coefficients");
  if (j.at("m").get<int>() != s.link.m()) throw DataError("model field m does not match beta");
  s.risk = j.at("risk").get<double>();
  return s;
}

json diagnostics_json(const FitDiagnostics& d) {
  json chains = json::array();
  for (const auto& c : d.chains) {
    chains.push_back({{"seed", c.seed},
                      {"final_risk", c.final_risk},
                      {"acceptance_rate", c.acceptance_rate},
                      {"stabilized", c.stabilized}});
  }
  return {{"lambda", d.lambda},
          {"steps", d.steps},
          {"warm_start", to_string(d.warm_start)},
          {"warm_start_fallback", d.warm_start_fallback},
          {"selected_chain", d.selected_chain},
          {"chains", chains}};
}

FitDiagnostics diagnostics_from(const json& j) {
  FitDiagnostics d;
  d.lambda = j.at("lambda").get<double>();
  d.steps = j.at("steps").get<int>();
  d.warm_start = warm_start_from_string(j.at("warm_start").get<std::string>());
  d.warm_start_fallback = j.at("warm_start_fallback").get<bool>();
  d.selected_chain = j.at("selected_chain").get<int>();
  for (const auto& c : j.at("chains")) {
    d.chains.push_back({c.at("seed").get<std::uint64_t>(), c.at("final_risk").get<double>(),
                        c.at("acceptance_rate").get<double>(), c.at("stabilized").get<bool>()});
  }
  return d;
}

}  // namespace

json to_json(const SavedModel& model) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["state"] = state_json(model.state);
  json tail = json::array();
  for (const auto& s : model.tail_states) tail.push_back(state_json(s));
  j["tail_states"] = tail;
  if (model.normalization) {
    j["normalization"] = {{"col_min", vector_json(model.normalization->col_min)},
                          {"col_max", vector_json(model.normalization->col_max)},
                          {"y_scale", model.normalization->y_scale}};
  } else {
    j["normalization"] = nullptr;
  }
  j["feature_names"] = model.feature_names;
  j["target"] = model.target;
  j["config"] = to_json(model.config);
  j["diagnostics"] = diagnostics_json(model.diagnostics);
  return j;
}

SavedModel model_from_json(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw DataError("unsupported model schema version " + std::to_string(version));
    }
    SavedModel m;
    m.state = state_from(j.at("state"));
    for (const auto& s : j.at("tail_states")) m.tail_states.push_back(state_from(s));
    const json& norm = j.at("normalization");
    if (!norm.is_null()) {
      NormalizationParams p;
      p.col_min = vector_from(norm.at("col_min"));
      p.col_max = vector_from(norm.at("col_max"));
      p.y_scale = norm.at("y_scale").get<double>();
      if (p.col_min.size() != m.state.index.dim() || p.col_max.size() != m.state.index.dim()) {
        throw DataError("normalization parameters do not match the index dimension");
      }
      m.normalization = p;
    }
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.target = j.at("target").get<std::string>();
    m.config = gibbs_from_json(j.at("config"));
    m.diagnostics = diagnostics_from(j.at("diagnostics"));
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const SavedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_json(model).dump(2) << '\n';
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("model '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

Eigen::VectorXd predict_scaled(const SavedModel& model, const Eigen::MatrixXd& x) {
  if (model.tail_states.empty()) return predict(model.state.index, model.state.link, x);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.rows());
  for (const auto& s : model.tail_states) acc += predict(s.index, s.link, x);
  return acc / static_cast<double>(model.tail_states.size());
}

Eigen::VectorXd predict_raw(const SavedModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.state.index.dim()) {
    throw DataError("input has " + std::to_string(x.cols()) + " features, model expects " +
                    std::to_string(model.state.index.dim()));
  }
  if (!model.normalization) return predict_scaled(model, x);
  return predict_scaled(model, model.normalization->apply_inputs(x)) / model.normalization->y_scale;
}

}  // namespace sparse_si

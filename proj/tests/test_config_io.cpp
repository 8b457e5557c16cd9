#include "doctest.h"

#include "sparse_si/config.hpp"
#include "sparse_si/model_io.hpp"

#include <filesystem>

using namespace sparse_si;

TEST_SUITE("config") {

TEST_CASE("experiment TOML") {
  const ExperimentSpec spec = parse_experiment_toml(R"(
name = "model2"
repetitions = 5
seed = 17
methods = ["fourier", "lasso"]

[synthetic]
model = "si"
n = 80
p = 6
sigma = 0.3

[gibbs]
steps = 200
warm_start = "hhi"
C = 5.0
)");
  CHECK(spec.name == "model2");
  CHECK(spec.repetitions == 5);
  CHECK(spec.seed == 17);
  CHECK(spec.methods == std::vector<Method>{Method::Fourier, Method::Lasso});
  const auto& syn = std::get<SyntheticSpec>(spec.source);
  CHECK(syn.n == 80);
  CHECK(syn.sigma == 0.3);
  CHECK(*spec.gibbs.steps == 200);
  CHECK(*spec.gibbs.warm_start == WarmStart::Hhi);
  CHECK(spec.gibbs.C == 5.0);
  CHECK_FALSE(spec.gibbs.lambda.has_value());

  // Round trip through the JSON form used in run manifests.
  const nlohmann::json j = to_json(spec);
  CHECK(j["synthetic"]["p"] == 6);
  CHECK(gibbs_from_json(j["gibbs"]).C == 5.0);
}

TEST_CASE("dataset paths resolve against the config directory") {
  const ExperimentSpec spec = parse_experiment_toml("[dataset]\npath = \"data/x.csv\"\naugment = true\n", "/tmp/cfg");
  const auto& csv = std::get<CsvSource>(spec.source);
  CHECK(csv.path == "/tmp/cfg/data/x.csv");
  CHECK(csv.augment);
  CHECK(csv.augment_factor == 4);
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_WITH(parse_experiment_toml("[synthetic]\nsigm = 0.1\n"), doctest::Contains("sigm"));
  CHECK_THROWS_WITH(parse_experiment_toml("rep = 3\n[synthetic]\n"), doctest::Contains("rep"));
  CHECK_THROWS(parse_experiment_toml("name = \"x\"\n"));
  CHECK_THROWS(parse_experiment_toml("[synthetic]\n[dataset]\npath = \"a\"\n"));
  CHECK_THROWS(parse_experiment_toml("[synthetic]\nn = \"many\"\n"));
  CHECK_THROWS(parse_experiment_toml("[synthetic]\n[gibbs]\nC = 0.5\n"));
  CHECK_THROWS_WITH(parse_experiment_toml("[synthetic\n"), doctest::Contains("line 1"));
}

}

TEST_SUITE("model_io") {

namespace {

SavedModel example_model() {
  SavedModel m;
  m.state.index = IndexVector::normalized(Eigen::Vector3d(0.5, 0.0, -0.5));
  m.state.link = LinkCoeffs{Eigen::Vector3d(0.1, 0.2, -0.3)};
  m.state.risk = 0.0421;
  m.feature_names = {"a", "b", "c"};
  m.target = "out";
  m.config = GibbsConfig{}.resolved(50, 3);
  m.diagnostics.lambda = 200.0;
  m.diagnostics.steps = 1000;
  m.diagnostics.chains.push_back({7, 0.0421, 0.3, true});
  return m;
}

}  // namespace

TEST_CASE("model JSON round trip") {
  SavedModel m = example_model();
  NormalizationParams norm;
  norm.col_min = Eigen::Vector3d(0, 1, 2);
  norm.col_max = Eigen::Vector3d(2, 3, 6);
  norm.y_scale = 0.25;
  m.normalization = norm;

  const auto path = (std::filesystem::temp_directory_path() / "sparse_si_model.json").string();
  save_model(m, path);
  const SavedModel back = load_model(path);
  std::filesystem::remove(path);

  CHECK(back.state.index == m.state.index);
  CHECK(back.state.link.beta == m.state.link.beta);
  CHECK(back.state.risk == m.state.risk);
  CHECK(back.feature_names == m.feature_names);
  CHECK(back.target == "out");
  CHECK(back.normalization->y_scale == 0.25);
  CHECK(*back.config.lambda == 200.0);
  CHECK(back.diagnostics.chains.at(0).seed == 7);
  CHECK(to_json(back) == to_json(m));
}

TEST_CASE("malformed models are data errors") {
  nlohmann::json j = to_json(example_model());
  nlohmann::json bad = j;
  bad["schema_version"] = 99;
  CHECK_THROWS_AS(model_from_json(bad), DataError);
  bad = j;
  bad["state"]["m"] = 5;
  CHECK_THROWS_AS(model_from_json(bad), DataError);
  bad = j;
  bad["state"]["index"] = {0.7, 0.7, 0.0};
  CHECK_THROWS_AS(model_from_json(bad), DataError);
  bad = j;
  bad.erase("diagnostics");
  CHECK_THROWS_AS(model_from_json(bad), DataError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), DataError);
}

TEST_CASE("raw predictions undo the normalization") {
  SavedModel m = example_model();
  NormalizationParams norm;
  norm.col_min = Eigen::Vector3d(0, 0, 0);
  norm.col_max = Eigen::Vector3d(10, 10, 10);
  norm.y_scale = 0.5;
  m.normalization = norm;
  Eigen::MatrixXd raw(2, 3);
  raw << 5, 5, 5, 10, 0, 2.5;
  Eigen::MatrixXd scaled(2, 3);
  scaled << 0, 0, 0, 1, -1, -0.5;
  CHECK((predict_raw(m, raw) - predict_scaled(m, scaled) / 0.5).norm() < 1e-12);
  CHECK_THROWS_AS(predict_raw(m, Eigen::MatrixXd::Zero(1, 2)), DataError);

  m.tail_states = {m.state, m.state};
  m.tail_states[1].link.beta[0] += 1.0;
  CHECK((predict_scaled(m, scaled).array() - predict(m.state.index, m.state.link, scaled).array() - 0.5).abs().maxCoeff() <
        1e-12);
}

}

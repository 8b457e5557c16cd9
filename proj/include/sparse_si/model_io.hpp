#pragma once

#include "sparse_si/data.hpp"
#include "sparse_si/sampler.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sparse_si {

inline constexpr int kModelSchemaVersion = 1;

// A fitted single-index model as persisted by the CLI.
struct SavedModel {
  ModelState state;
  // Non-empty when predictions average over the chain tail.
  std::vector<ModelState> tail_states;
  // Present when the model was fitted on normalized data; inputs given to
  // predict_raw are mapped with it and predictions are mapped back to the
  // original response units.
  std::optional<NormalizationParams> normalization;
  std::vector<std::string> feature_names;
  std::string target = "y";
  GibbsConfig config;  // resolved
  FitDiagnostics diagnostics;
};

nlohmann::json to_json(const SavedModel& model);
// Throws DataError on a malformed document or an unsupported schema version.
SavedModel model_from_json(const nlohmann::json& j);

void save_model(const SavedModel& model, const std::string& path);
SavedModel load_model(const std::string& path);

// Predictions on the fitted scale for inputs already in [-1, 1].
Eigen::VectorXd predict_scaled(const SavedModel& model, const Eigen::MatrixXd& x);
// Predictions in the original response units for raw inputs.
Eigen::VectorXd predict_raw(const SavedModel& model, const Eigen::MatrixXd& x);

}  // namespace sparse_si

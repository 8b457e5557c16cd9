#pragma once

#include "sparse_si/bench.hpp"

#include "json.hpp"

#include <string>

namespace sparse_si {

// Experiment configuration in TOML:
//
//   name = "model2"
//   repetitions = 20
//   seed = 1
//   methods = ["fourier", "hhi", "lasso", "nw"]
//
//   [synthetic]            # or [dataset] with path, target, augment, augment_factor
//   model = "si"
//   n = 100
//   p = 10
//   sigma = 0.2
//
//   [gibbs]                # any subset of the GibbsConfig fields
//   steps = 1000
//   warm_start = "hhi"
//
// Relative dataset paths are resolved against base_dir. Unknown keys are
// rejected so that typos do not silently fall back to defaults.
ExperimentSpec parse_experiment_toml(const std::string& text, const std::string& base_dir = ".");
ExperimentSpec load_experiment_config(const std::string& path);

// Applies the keys present in `j` on top of `cfg`.
GibbsConfig gibbs_from_json(const nlohmann::json& j, GibbsConfig cfg = {});
nlohmann::json to_json(const GibbsConfig& cfg);
nlohmann::json to_json(const SyntheticSpec& spec);
nlohmann::json to_json(const ExperimentSpec& spec);

}  // namespace sparse_si

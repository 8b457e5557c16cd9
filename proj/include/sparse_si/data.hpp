#pragma once

#include "sparse_si/core.hpp"

#include <string>
#include <vector>

namespace sparse_si {

// Shortest round-trip form: 17 significant digits.
std::string format_double(double v);

enum class SyntheticModel { Linear, SI, NP };

std::string to_string(SyntheticModel m);
// Accepts "linear", "si", "np" (case-insensitive) and the aliases
// "model1".."model3"; throws std::invalid_argument otherwise.
SyntheticModel synthetic_model_from_string(const std::string& s);

struct SyntheticSpec {
  SyntheticModel model = SyntheticModel::SI;
  long n = 100;
  long p = 10;
  double sigma = 0.2;  // 0 gives noiseless responses
  std::uint64_t seed = 0;

  void validate() const;
};

// Regression functions with theta* = (0.5, 0.5, 0, ..., 0).
double regression_function(SyntheticModel model, const Eigen::Ref<const Eigen::VectorXd>& x);

// X uniform on [-1, 1]^p, Y = F(X) + N(0, sigma^2).
Dataset simulate(const SyntheticSpec& spec);

// A CSV table split into features and a target column. The data are raw: no
// range check is applied.
struct LabeledData {
  Dataset data;
  std::vector<std::string> feature_names;
  std::string target;
  long dropped_rows = 0;  // rows removed for missing or non-numeric cells
};

// RFC-4180 parsing: quoted fields, doubled quotes, CRLF or LF line endings.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// All-numeric CSV body under a header row. Rows with an empty, "NA", "?" or
// otherwise non-numeric cell are dropped.
struct NumericTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
  long dropped_rows = 0;

  // Position of a header name; throws DataError if absent.
  Eigen::Index column(const std::string& name) const;
};
NumericTable parse_numeric_csv(const std::string& text);
NumericTable read_numeric_csv(const std::string& path);

// Missing cells follow the NumericTable policy. An empty target name selects the last column. Throws DataError on a missing
// target column or an empty result.
LabeledData load_csv(const std::string& path, const std::string& target = "");
LabeledData parse_labeled_csv(const std::string& text, const std::string& target = "");

void write_csv(const std::string& path, const Dataset& data, const std::vector<std::string>& feature_names = {},
               const std::string& target = "y");

struct NormalizationParams {
  Eigen::VectorXd col_min;
  Eigen::VectorXd col_max;
  double y_scale = 1.0;

  // Maps inputs affinely onto [-1, 1] (constant columns to 0), clipping values
  // outside the fitted range, and multiplies y by y_scale.
  Dataset apply(const Dataset& raw) const;
  Eigen::MatrixXd apply_inputs(const Eigen::MatrixXd& x) const;
};

// Fits min/max and output scale 0.5 / sd(y) on `train`. Throws DataError when
// sd(y) is zero.
NormalizationParams fit_normalization(const Dataset& train);

struct NormalizedPair {
  Dataset train;
  Dataset apply_to;
  NormalizationParams params;
};
NormalizedPair normalize(const Dataset& train, const Dataset& apply_to);

// Appends p (factor - 1) columns of iid uniform [0, 1] noise.
Dataset augment_noise(const Dataset& data, int factor, std::uint64_t seed);

// Rows of `data` selected by `rows`.
Dataset subset_rows(const Dataset& data, const std::vector<int>& rows);

}  // namespace sparse_si

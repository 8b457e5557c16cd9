#include "sparse_si/data.hpp"

#include "sparse_si/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparse_si {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& cell) {
  const std::string s = trim(cell);
  if (s.empty() || s == "NA" || s == "?") return std::nullopt;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(SyntheticModel m) {
  switch (m) {
    case SyntheticModel::Linear: return "linear";
    case SyntheticModel::SI: return "si";
    case SyntheticModel::NP: return "np";
  }
  return "unknown";
}

SyntheticModel synthetic_model_from_string(const std::string& s) {
  const std::string l = lower(s);
  if (l == "linear" || l == "model1") return SyntheticModel::Linear;
  if (l == "si" || l == "model2") return SyntheticModel::SI;
  if (l == "np" || l == "model3") return SyntheticModel::NP;
  throw std::invalid_argument("unknown synthetic model '" + s + "' (expected linear, si or np)");
}

void SyntheticSpec::validate() const {
  if (n < 1) throw std::invalid_argument("synthetic n must be positive");
  const long min_p = model == SyntheticModel::NP ? 3 : 2;
  if (p < min_p) {
    throw std::invalid_argument("model " + to_string(model) + " needs p >= " + std::to_string(min_p));
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be finite and >= 0");
}

double regression_function(SyntheticModel model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  switch (model) {
    case SyntheticModel::Linear: return 2.0 * (0.5 * x[0] + 0.5 * x[1]);
    case SyntheticModel::SI: {
      const double t = 0.5 * x[0] + 0.5 * x[1];
      return 2.0 * t * t + t;
    }
    case SyntheticModel::NP: return 2.0 * std::abs(x[1]) * std::sqrt(std::abs(x[0])) - x[2] * x[2] * x[2];
  }
  return 0.0;
}

Dataset simulate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd x(spec.n, spec.p);
  for (long i = 0; i < spec.n; ++i) {
    for (long j = 0; j < spec.p; ++j) x(i, j) = unif(rng);
  }
  Eigen::VectorXd y(spec.n);
  for (long i = 0; i < spec.n; ++i) {
    y[i] = regression_function(spec.model, x.row(i).transpose()) + spec.sigma * noise(rng);
  }
  return Dataset{std::move(x), std::move(y)};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r': break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::Index NumericTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("column '" + name + "' not found in CSV header");
  return static_cast<Eigen::Index>(it - header.begin());
}

NumericTable parse_numeric_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw DataError("CSV has no header row");
  NumericTable out;
  for (const auto& h : rows.front()) out.header.push_back(trim(h));
  const std::size_t cols = out.header.size();

  std::vector<std::vector<double>> kept;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::vector<double> values;
    bool ok = row.size() == cols;
    for (std::size_t c = 0; ok && c < cols; ++c) {
      const auto v = parse_number(row[c]);
      if (!v) ok = false;
      else values.push_back(*v);
    }
    if (ok) kept.push_back(std::move(values));
    else ++out.dropped_rows;
  }
  if (kept.empty()) {
    throw DataError("empty dataset: " + std::to_string(rows.size() - 1) + " data rows, " +
                    std::to_string(out.dropped_rows) + " dropped for missing or non-numeric cells");
  }
  out.values.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = kept[i][c];
    }
  }
  return out;
}

NumericTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_numeric_csv(buf.str());
}

LabeledData parse_labeled_csv(const std::string& text, const std::string& target) {
  NumericTable table = parse_numeric_csv(text);
  if (table.header.size() < 2) throw DataError("CSV needs at least one feature column and a target column");
  const Eigen::Index target_col =
      target.empty() ? static_cast<Eigen::Index>(table.header.size()) - 1 : table.column(target);

  LabeledData out;
  out.target = table.header[static_cast<std::size_t>(target_col)];
  out.dropped_rows = table.dropped_rows;
  const Eigen::Index n = table.values.rows();
  const Eigen::Index p = table.values.cols() - 1;
  out.data.x.resize(n, p);
  out.data.y = table.values.col(target_col);
  Eigen::Index j = 0;
  for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
    if (c == target_col) continue;
    out.feature_names.push_back(table.header[static_cast<std::size_t>(c)]);
    out.data.x.col(j++) = table.values.col(c);
  }
  return out;
}

LabeledData load_csv(const std::string& path, const std::string& target) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labeled_csv(buf.str(), target);
}

void write_csv(const std::string& path, const Dataset& data, const std::vector<std::string>& feature_names,
               const std::string& target) {
  if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != data.p()) {
    throw std::invalid_argument("write_csv: feature name count does not match p");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    out << quote_if_needed(feature_names.empty() ? "x" + std::to_string(j + 1) : feature_names[j]) << ',';
  }
  out << quote_if_needed(target) << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) out << format_double(data.x(i, j)) << ',';
    out << format_double(data.y[i]) << '\n';
  }
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

NormalizationParams fit_normalization(const Dataset& train) {
  if (train.n() < 2) throw DataError("normalization needs at least 2 training rows");
  NormalizationParams params;
  params.col_min = train.x.colwise().minCoeff().transpose();
  params.col_max = train.x.colwise().maxCoeff().transpose();
  const double sd = sample_sd(train.y);
  if (!(sd > 0.0)) throw DataError("training response has zero standard deviation");
  params.y_scale = 0.5 / sd;
  return params;
}

Eigen::MatrixXd NormalizationParams::apply_inputs(const Eigen::MatrixXd& x) const {
  if (x.cols() != col_min.size()) throw DataError("normalization: column count mismatch");
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double lo = col_min[j];
    const double hi = col_max[j];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(i, j) = hi > lo ? std::clamp(2.0 * (x(i, j) - lo) / (hi - lo) - 1.0, -1.0, 1.0) : 0.0;
    }
  }
  return out;
}

Dataset NormalizationParams::apply(const Dataset& raw) const {
  return Dataset{apply_inputs(raw.x), raw.y * y_scale};
}

NormalizedPair normalize(const Dataset& train, const Dataset& apply_to) {
  NormalizationParams params = fit_normalization(train);
  return {params.apply(train), params.apply(apply_to), std::move(params)};
}

Dataset augment_noise(const Dataset& data, int factor, std::uint64_t seed) {
  if (factor < 2) throw std::invalid_argument("augment_noise: factor must be >= 2");
  const Eigen::Index p = data.p();
  Dataset out{Eigen::MatrixXd(data.n(), p * factor), data.y};
  out.x.leftCols(p) = data.x;
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = p; j < p * factor; ++j) out.x(i, j) = unif(rng);
  }
  return out;
}

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), data.p()),
              Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.x.row(static_cast<Eigen::Index>(r)) = data.x.row(rows[r]);
    out.y[static_cast<Eigen::Index>(r)] = data.y[rows[r]];
  }
  return out;
}

}  // namespace sparse_si

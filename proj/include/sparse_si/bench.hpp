#pragma once

#include "sparse_si/data.hpp"
#include "sparse_si/sampler.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sparse_si {

enum class Method { Fourier, Hhi, Lasso, Nw };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
// Table column order.
const std::vector<Method>& all_methods();

struct CsvSource {
  std::string path;
  std::string target;  // empty: last column
  bool augment = false;
  int augment_factor = 4;
};

struct ExperimentSpec {
  std::string name = "experiment";
  std::variant<SyntheticSpec, CsvSource> source = SyntheticSpec{};
  std::vector<Method> methods = all_methods();
  int repetitions = 20;
  std::uint64_t seed = 0;
  GibbsConfig gibbs;

  void validate() const;
};

struct ResultRow {
  Method method = Method::Fourier;
  double median = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  int n_valid = 0;
  std::vector<std::optional<double>> per_rep;  // nullopt when the fit failed
  std::vector<std::string> flags;
};

struct LinkPlotData {
  ModelState state;
  Dataset train;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // table column order
  // FNV-1a hash of (train, test) for each repetition.
  std::vector<std::uint64_t> split_hashes;
  // Fourier fit of the first repetition, when Fourier ran successfully.
  std::optional<LinkPlotData> link_plot;
};

// Seed of repetition r.
std::uint64_t repetition_seed(std::uint64_t seed, int r);
std::uint64_t hash_dataset(const Dataset& d, std::uint64_t h = 1469598103934665603ULL);

// Median, mean and sample sd over the valid entries of row.per_rep.
void compute_statistics(ResultRow& row);

ExperimentResult run_experiment(const ExperimentSpec& spec);

enum class SummaryFormat { Csv, Markdown };
std::string summarize(const std::vector<ResultRow>& rows, SummaryFormat format);
std::string raw_csv(const std::vector<ResultRow>& rows);

// 512 rows (kind=grid, t, f(t)) on [-1, 1] followed by n rows
// (kind=data, theta^T x_i, y_i).
std::string link_plot_csv(const ModelState& state, const Dataset& data);
void emit_link_plot(const ModelState& state, const Dataset& data, const std::string& path);

// Writes <dir>/<name>_summary.csv, _summary.md, _raw.csv and, if available,
// _linkplot.csv. Returns the written paths.
std::vector<std::string> write_experiment_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                                                  const std::string& dir);

void write_text_file(const std::string& path, const std::string& text);

// Compares a long RJMCMC chain with an importance-sampling estimate of the
// same Gibbs posterior (prior draws weighted by exp(-lambda R_n)) on a small
// Model 2 instance.
struct PosteriorOracleSpec {
  long n = 30;
  long p = 3;
  double lambda = 10.0;
  double C = 1e100;
  double s = 0.1;
  int steps = 200000;
  double burn_in = 0.1;
  long draws = 1000000;
  std::uint64_t seed = 0;
  double prob_tol = 0.05;      // absolute, per support set
  double risk_rel_tol = 0.05;  // relative, posterior mean of R_n
};

struct PosteriorOracleReport {
  std::vector<std::vector<int>> supports;  // all 2^p - 1 nonempty sets
  std::vector<double> chain_probs;
  std::vector<double> is_probs;
  double chain_mean_risk = 0.0;
  double is_mean_risk = 0.0;
  double is_ess = 0.0;  // Kish effective sample size of the weights
  double max_prob_diff = 0.0;
  double risk_rel_diff = 0.0;
  bool passed = false;
};

PosteriorOracleReport run_posterior_oracle(const PosteriorOracleSpec& spec);

}  // namespace sparse_si

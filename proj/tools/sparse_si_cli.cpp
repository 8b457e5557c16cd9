// Command-line front end: fit, predict, simulate, benchmark, oracle-check.

#include "sparse_si/bench.hpp"
#include "sparse_si/config.hpp"
#include "sparse_si/model_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sparse_si;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kCheckFailed = 3;

struct GibbsFlags {
  std::optional<double> lambda;
  std::optional<int> steps;
  std::optional<int> chains;
  std::optional<std::string> warm_start;
  std::optional<double> C;
  std::optional<double> s;
  std::optional<double> delta;
  bool average_tail = false;

  void add_to(CLI::App* app) {
    app->add_option("--lambda", lambda, "Inverse temperature (default 4n)");
    app->add_option("--steps", steps, "MCMC steps per chain (default 1000 if p <= 10, else 5000)");
    app->add_option("--chains", chains, "Number of chains (default 3)");
    app->add_option("--warm-start", warm_start, "Chain start: none, hhi or lasso")
        ->check(CLI::IsMember({"none", "hhi", "lasso"}));
    app->add_option("--C", C, "Link coefficient bound: sum_j j|beta_j| <= C + 1");
    app->add_option("--s", s, "Link proposal standard deviation");
    app->add_option("--delta", delta, "Index perturbation half-width");
    app->add_flag("--average-tail", average_tail, "Average predictions over the last 20% of the chain");
  }

  GibbsConfig apply(GibbsConfig cfg) const {
    if (lambda) cfg.lambda = *lambda;
    if (steps) cfg.steps = *steps;
    if (chains) cfg.chains = *chains;
    if (warm_start) cfg.warm_start = warm_start_from_string(*warm_start);
    if (C) cfg.C = *C;
    if (s) cfg.s = *s;
    if (delta) cfg.delta = *delta;
    if (average_tail) cfg.average_tail = true;
    cfg.validate();
    return cfg;
  }
};

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "unreadable";
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  json manifest;
  manifest["tool"] = "sparse_si";
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["config"] = config;
  json in = json::array();
  for (const auto& path : inputs) in.push_back({{"path", path}, {"fnv1a64", file_digest(path)}});
  manifest["inputs"] = in;
  json out = json::array();
  for (const auto& path : outputs) out.push_back(fs::path(path).filename().string());
  manifest["outputs"] = out;
  write_text_file((out_dir / "run.json").string(), manifest.dump(2) + "\n");
}

int run_fit(const std::string& data_path, const std::string& target, bool normalize_inputs, std::uint64_t seed,
            const GibbsFlags& flags, const std::string& out) {
  LabeledData table = load_csv(data_path, target);
  SavedModel model;
  Dataset train = table.data;
  if (normalize_inputs) {
    model.normalization = fit_normalization(train);
    train = model.normalization->apply(train);
  }
  validate_dataset(train);

  GibbsConfig cfg = flags.apply(GibbsConfig{});
  cfg.seed = seed;
  cfg = cfg.resolved(train.n(), train.p());
  const FitResult fitted = fit(train, cfg);

  model.state = fitted.state;
  model.tail_states = fitted.tail_states;
  model.feature_names = table.feature_names;
  model.target = table.target;
  model.config = cfg;
  model.diagnostics = fitted.diagnostics;

  fs::create_directories(out);
  const fs::path dir(out);
  const std::string model_path = (dir / "model.json").string();
  const std::string plot_path = (dir / "linkplot.csv").string();
  save_model(model, model_path);
  emit_link_plot(fitted.state, train, plot_path);

  json config = {{"data", data_path},           {"target", table.target},
                 {"normalize", normalize_inputs}, {"rows_used", train.n()},
                 {"rows_dropped", table.dropped_rows}, {"gibbs", to_json(cfg)}};
  write_manifest(dir, "fit", config, {data_path}, {model_path, plot_path});

  std::cout << "support:";
  for (int j : fitted.state.index.support()) std::cout << ' ' << table.feature_names[static_cast<std::size_t>(j)];
  std::cout << "\nm: " << fitted.state.link.m() << "\nrisk: " << format_double(fitted.state.risk)
            << "\nlambda: " << format_double(fitted.diagnostics.lambda) << "\nselected chain: "
            << fitted.diagnostics.selected_chain << "\nwrote " << model_path << "\n";
  if (fitted.diagnostics.warm_start_fallback) std::cerr << "warning: warm start failed, chains started from the prior\n";
  return kOk;
}

int run_predict(const std::string& model_path, const std::string& data_path, const std::string& out) {
  const SavedModel model = load_model(model_path);
  const NumericTable table = read_numeric_csv(data_path);
  const Eigen::Index p = model.state.index.dim();

  Eigen::MatrixXd x(table.values.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::Index col = model.feature_names.empty() ? j : table.column(model.feature_names[j]);
    x.col(j) = table.values.col(col);
  }
  std::optional<Eigen::VectorXd> y;
  if (std::find(table.header.begin(), table.header.end(), model.target) != table.header.end()) {
    y = table.values.col(table.column(model.target));
  }
  if (!model.normalization) validate_dataset(Dataset{x, y ? *y : Eigen::VectorXd::Zero(x.rows())});

  const Eigen::VectorXd pred = predict_raw(model, x);
  fs::create_directories(out);
  const fs::path dir(out);
  const std::string pred_path = (dir / "predictions.csv").string();
  std::ostringstream csv;
  csv << "prediction\n";
  for (double v : pred) csv << format_double(v) << '\n';
  write_text_file(pred_path, csv.str());

  json config = {{"model", model_path}, {"data", data_path}, {"rows", x.rows()}, {"rows_dropped", table.dropped_rows}};
  if (y) {
    // Error on the scale the model was fitted on, comparable with its risk.
    const double scale = model.normalization ? model.normalization->y_scale : 1.0;
    const Eigen::VectorXd resid = (pred - *y) * scale;
    const double mse = resid.squaredNorm() / static_cast<double>(resid.size());
    config["mse"] = mse;
    std::cout << "mse: " << format_double(mse) << '\n';
  }
  write_manifest(dir, "predict", config, {model_path, data_path}, {pred_path});
  std::cout << "wrote " << pred_path << '\n';
  return kOk;
}

int run_simulate(const std::string& model_name, long n, long p, double sigma, std::uint64_t seed,
                 const std::string& out, const std::string& name) {
  SyntheticSpec spec{synthetic_model_from_string(model_name), n, p, sigma, seed};
  const Dataset data = simulate(spec);
  fs::create_directories(out);
  const fs::path dir(out);
  const std::string path = (dir / (name + ".csv")).string();
  write_csv(path, data);
  write_manifest(dir, "simulate", to_json(spec), {}, {path});
  std::cout << "wrote " << path << '\n';
  return kOk;
}

int run_benchmark(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                  const std::optional<int>& reps, const GibbsFlags& flags, const std::string& out) {
  ExperimentSpec spec = load_experiment_config(config_path);
  if (seed) spec.seed = *seed;
  if (reps) spec.repetitions = *reps;
  spec.gibbs = flags.apply(spec.gibbs);
  spec.validate();

  const ExperimentResult result = run_experiment(spec);
  const auto paths = write_experiment_outputs(spec, result, out);
  std::vector<std::string> inputs{config_path};
  if (const auto* csv = std::get_if<CsvSource>(&spec.source)) inputs.push_back(csv->path);
  write_manifest(fs::path(out), "benchmark", to_json(spec), inputs, paths);
  std::cout << summarize(result.rows, SummaryFormat::Markdown);
  for (const auto& path : paths) std::cout << "wrote " << path << '\n';
  return kOk;
}

int run_oracle_check(const PosteriorOracleSpec& spec, const std::string& out) {
  const PosteriorOracleReport report = run_posterior_oracle(spec);
  std::ostringstream text;
  text << "support,chain,importance_sampling\n";
  for (std::size_t k = 0; k < report.supports.size(); ++k) {
    std::string name = "{";
    for (std::size_t i = 0; i < report.supports[k].size(); ++i) {
      name += (i ? " " : "") + std::to_string(report.supports[k][i] + 1);
    }
    text << '"' << name << "}\"," << format_double(report.chain_probs[k]) << ','
         << format_double(report.is_probs[k]) << '\n';
  }
  std::cout << text.str();
  std::cout << "mean risk: chain " << format_double(report.chain_mean_risk) << ", importance sampling "
            << format_double(report.is_mean_risk) << "\nimportance-sampling effective sample size: "
            << format_double(report.is_ess) << "\nmax support-probability difference: "
            << format_double(report.max_prob_diff) << " (tolerance " << spec.prob_tol << ")\n"
            << "relative risk difference: " << format_double(report.risk_rel_diff) << " (tolerance "
            << spec.risk_rel_tol << ")\n"
            << (report.passed ? "PASS" : "FAIL") << '\n';
  if (!out.empty()) {
    fs::create_directories(out);
    const std::string path = (fs::path(out) / "oracle_check.csv").string();
    write_text_file(path, text.str());
    json config = {{"n", spec.n},         {"p", spec.p},         {"lambda", spec.lambda},
                   {"C", spec.C},         {"s", spec.s},         {"steps", spec.steps},
                   {"burn_in", spec.burn_in}, {"draws", spec.draws}, {"seed", spec.seed}};
    write_manifest(fs::path(out), "oracle-check", config, {}, {path});
  }
  return report.passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse single-index regression with a PAC-Bayesian Gibbs estimator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::uint64_t seed = 0;
  std::string out = ".";

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit the Gibbs estimator to a CSV file");
  std::string fit_data;
  std::string fit_target;
  bool fit_normalize = false;
  GibbsFlags fit_flags;
  fit_cmd->add_option("--data", fit_data, "Training CSV")->required();
  fit_cmd->add_option("--target", fit_target, "Response column (default: last column)");
  fit_cmd->add_flag("--normalize", fit_normalize, "Map inputs to [-1, 1] and scale the response to sd 0.5");
  fit_cmd->add_option("--seed", seed, "Random seed");
  fit_cmd->add_option("--out", out, "Output directory");
  fit_flags.add_to(fit_cmd);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Apply a saved model to a CSV file");
  std::string model_path;
  std::string predict_data;
  predict_cmd->add_option("--model", model_path, "Model JSON written by fit")->required();
  predict_cmd->add_option("--data", predict_data, "Input CSV")->required();
  predict_cmd->add_option("--out", out, "Output directory");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic dataset");
  std::string sim_model = "si";
  long sim_n = 100;
  long sim_p = 10;
  double sim_sigma = 0.2;
  std::string sim_name = "simulated";
  sim_cmd->add_option("--model", sim_model, "linear, si or np")->check(CLI::IsMember({"linear", "si", "np"}));
  sim_cmd->add_option("--n", sim_n, "Observations");
  sim_cmd->add_option("--p", sim_p, "Input dimension");
  sim_cmd->add_option("--sigma", sim_sigma, "Noise standard deviation");
  sim_cmd->add_option("--seed", seed, "Random seed");
  sim_cmd->add_option("--out", out, "Output directory");
  sim_cmd->add_option("--name", sim_name, "Output file stem");

  // benchmark
  auto* bench_cmd = app.add_subcommand("benchmark", "Run an experiment described by a TOML file");
  std::string config_path;
  std::optional<std::uint64_t> bench_seed;
  std::optional<int> bench_reps;
  GibbsFlags bench_flags;
  bench_cmd->add_option("--config", config_path, "Experiment TOML")->required();
  bench_cmd->add_option("--seed", bench_seed, "Override the experiment seed");
  bench_cmd->add_option("--repetitions", bench_reps, "Override the number of repetitions");
  bench_cmd->add_option("--out", out, "Output directory");
  bench_flags.add_to(bench_cmd);

  // oracle-check
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare the sampler with an importance-sampling oracle");
  PosteriorOracleSpec oracle;
  std::string oracle_out;
  oracle_cmd->add_option("--n", oracle.n, "Observations");
  oracle_cmd->add_option("--p", oracle.p, "Input dimension");
  oracle_cmd->add_option("--lambda", oracle.lambda, "Inverse temperature");
  oracle_cmd->add_option("--C", oracle.C, "Link coefficient bound: sum_j j|beta_j| <= C + 1");
  oracle_cmd->add_option("--s", oracle.s, "Link proposal standard deviation");
  oracle_cmd->add_option("--steps", oracle.steps, "Chain length");
  oracle_cmd->add_option("--draws", oracle.draws, "Importance-sampling draws");
  oracle_cmd->add_option("--seed", oracle.seed, "Random seed");
  oracle_cmd->add_option("--out", oracle_out, "Output directory (optional)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fit_cmd) return run_fit(fit_data, fit_target, fit_normalize, seed, fit_flags, out);
    if (*predict_cmd) return run_predict(model_path, predict_data, out);
    if (*sim_cmd) return run_simulate(sim_model, sim_n, sim_p, sim_sigma, seed, out, sim_name);
    if (*bench_cmd) return run_benchmark(config_path, bench_seed, bench_reps, bench_flags, out);
    if (*oracle_cmd) return run_oracle_check(oracle, oracle_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

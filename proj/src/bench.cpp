#include "sparse_si/bench.hpp"

#include "sparse_si/baselines.hpp"
#include "sparse_si/prior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace sparse_si {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

double test_mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

struct Split {
  Dataset train;
  Dataset test;
  double sigma = 0.0;  // noise level handed to the Lasso regularization
};

Split make_split(const ExperimentSpec& spec, const std::optional<Dataset>& csv_data, int r) {
  const std::uint64_t rep = repetition_seed(spec.seed, r);
  if (const auto* syn = std::get_if<SyntheticSpec>(&spec.source)) {
    SyntheticSpec train_spec = *syn;
    train_spec.seed = splitmix64(rep ^ 1);
    SyntheticSpec test_spec = *syn;
    test_spec.seed = splitmix64(rep ^ 2);
    return {simulate(train_spec), simulate(test_spec), syn->sigma};
  }
  const Dataset& all = *csv_data;
  std::vector<int> perm(static_cast<std::size_t>(all.n()));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(rep);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto half = perm.size() / 2;
  std::vector<int> train_rows(perm.begin(), perm.begin() + static_cast<long>(half));
  std::vector<int> test_rows(perm.begin() + static_cast<long>(half), perm.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  NormalizedPair norm = normalize(subset_rows(all, train_rows), subset_rows(all, test_rows));
  const double sigma = sample_sd(norm.train.y) / 2.0;
  return {std::move(norm.train), std::move(norm.apply_to), sigma};
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed3(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Fourier: return "fourier";
    case Method::Hhi: return "hhi";
    case Method::Lasso: return "lasso";
    case Method::Nw: return "nw";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  for (Method m : all_methods()) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown method '" + s + "' (expected fourier, hhi, lasso or nw)");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::Fourier, Method::Hhi, Method::Lasso, Method::Nw};
  return methods;
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (methods.empty()) throw std::invalid_argument("at least one method is required");
  if (const auto* syn = std::get_if<SyntheticSpec>(&source)) {
    syn->validate();
    if (syn->n < 5) throw std::invalid_argument("synthetic n must be >= 5");
  } else {
    const auto& csv = std::get<CsvSource>(source);
    if (csv.path.empty()) throw std::invalid_argument("dataset path is empty");
    if (csv.augment && csv.augment_factor < 2) throw std::invalid_argument("augment_factor must be >= 2");
  }
  gibbs.validate();
}

std::uint64_t repetition_seed(std::uint64_t seed, int r) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r) + 1));
}

std::uint64_t hash_dataset(const Dataset& d, std::uint64_t h) {
  const std::int64_t dims[2] = {d.n(), d.p()};
  h = fnv1a(dims, sizeof dims, h);
  h = fnv1a(d.x.data(), sizeof(double) * static_cast<std::size_t>(d.x.size()), h);
  return fnv1a(d.y.data(), sizeof(double) * static_cast<std::size_t>(d.y.size()), h);
}

void compute_statistics(ResultRow& row) {
  std::vector<double> v;
  for (const auto& e : row.per_rep) {
    if (e) v.push_back(*e);
  }
  row.n_valid = static_cast<int>(v.size());
  if (v.empty()) {
    row.median = row.mean = row.sd = std::numeric_limits<double>::quiet_NaN();
    row.flags.push_back("no_valid_reps");
    return;
  }
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  row.median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  row.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(k);
  if (k < 2) {
    row.sd = 0.0;
    row.flags.push_back("insufficient_reps");
    return;
  }
  double ss = 0.0;
  for (double e : v) ss += (e - row.mean) * (e - row.mean);
  row.sd = std::sqrt(ss / static_cast<double>(k - 1));
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  std::optional<Dataset> csv_data;
  if (const auto* csv = std::get_if<CsvSource>(&spec.source)) {
    Dataset raw = load_csv(csv->path, csv->target).data;
    if (raw.n() < 10) throw DataError("dataset needs at least 10 complete rows for a half/half split");
    // Fake coordinates are appended once, before any split.
    csv_data = csv->augment ? augment_noise(raw, csv->augment_factor, splitmix64(spec.seed ^ 0xA06ULL)) : raw;
  }

  std::vector<Method> methods;
  for (Method m : all_methods()) {
    if (std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end()) methods.push_back(m);
  }

  ExperimentResult result;
  for (Method m : methods) {
    ResultRow row;
    row.method = m;
    result.rows.push_back(row);
  }

  for (int r = 0; r < spec.repetitions; ++r) {
    const Split split = make_split(spec, csv_data, r);
    result.split_hashes.push_back(hash_dataset(split.test, hash_dataset(split.train)));
    const double xi = default_lasso_xi(split.sigma, split.train.n(), split.train.p());

    const bool fourier_needs_hhi =
        std::find(methods.begin(), methods.end(), Method::Fourier) != methods.end() &&
        spec.gibbs.resolved(split.train.n(), split.train.p()).warm_start == WarmStart::Hhi;
    std::optional<HhiModel> hhi;
    std::string hhi_error;
    if (fourier_needs_hhi || std::find(methods.begin(), methods.end(), Method::Hhi) != methods.end()) {
      try {
        HhiOptions opts;
        opts.lasso_xi = xi;
        hhi = hhi_fit(split.train, opts);
      } catch (const std::exception& e) {
        hhi_error = e.what();
      }
    }

    for (ResultRow& row : result.rows) {
      std::optional<double> mse;
      try {
        switch (row.method) {
          case Method::Fourier: {
            GibbsConfig cfg = spec.gibbs;
            cfg.seed = splitmix64(repetition_seed(spec.seed, r) ^ 3);
            std::optional<IndexVector> warm;
            if (fourier_needs_hhi && hhi) warm = hhi->index;
            const FitResult fitted = fit(split.train, cfg, warm);
            mse = test_mse(predict(fitted, split.test.x), split.test.y);
            if (r == 0) result.link_plot = LinkPlotData{fitted.state, split.train};
            break;
          }
          case Method::Hhi:
            if (!hhi) throw std::runtime_error(hhi_error);
            mse = test_mse(hhi_predict(*hhi, split.train, split.test.x), split.test.y);
            break;
          case Method::Lasso:
            mse = test_mse(lasso_predict(lasso_fit(split.train, xi), split.test.x), split.test.y);
            break;
          case Method::Nw: {
            const KernelModel km = nw_select_bandwidth(split.train);
            mse = test_mse(nw_predict(split.train, km.bandwidth, split.test.x), split.test.y);
            break;
          }
        }
      } catch (const std::exception&) {
        mse.reset();
        row.flags.push_back("missing_rep_" + std::to_string(r + 1));
      }
      row.per_rep.push_back(mse);
    }
  }
  for (ResultRow& row : result.rows) compute_statistics(row);
  return result;
}

std::string summarize(const std::vector<ResultRow>& rows, SummaryFormat format) {
  if (rows.empty()) throw std::invalid_argument("summarize: no result rows");
  std::ostringstream out;
  if (format == SummaryFormat::Csv) {
    out << "statistic";
    for (const auto& r : rows) out << ',' << to_string(r.method);
    out << '\n';
    const std::pair<const char*, double ResultRow::*> stats[] = {
        {"median", &ResultRow::median}, {"mean", &ResultRow::mean}, {"sd", &ResultRow::sd}};
    for (const auto& [name, field] : stats) {
      out << name;
      for (const auto& r : rows) out << ',' << format_double(r.*field);
      out << '\n';
    }
    out << "n_valid";
    for (const auto& r : rows) out << ',' << r.n_valid;
    out << "\nflags";
    for (const auto& r : rows) out << ',' << csv_cell(join(r.flags, ";"));
    out << '\n';
    return out.str();
  }

  out << "| statistic |";
  for (const auto& r : rows) out << ' ' << to_string(r.method) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < rows.size(); ++i) out << "---|";
  out << '\n';
  auto emit = [&](const char* name, double ResultRow::*field, bool bold_min) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      if (std::isfinite(r.*field)) best = std::min(best, r.*field);
    }
    out << "| " << name << " |";
    for (const auto& r : rows) {
      const std::string v = fixed3(r.*field);
      out << ' ' << (bold_min && r.*field == best ? "**" + v + "**" : v) << " |";
    }
    out << '\n';
  };
  emit("median", &ResultRow::median, true);
  emit("mean", &ResultRow::mean, true);
  emit("s.d.", &ResultRow::sd, false);
  std::vector<std::string> notes;
  for (const auto& r : rows) {
    if (!r.flags.empty()) notes.push_back(to_string(r.method) + ": " + join(r.flags, ", "));
  }
  if (!notes.empty()) out << "\nFlags: " << join(notes, "; ") << '\n';
  return out.str();
}

std::string raw_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "repetition,method,mse\n";
  std::size_t reps = 0;
  for (const auto& r : rows) reps = std::max(reps, r.per_rep.size());
  for (std::size_t i = 0; i < reps; ++i) {
    for (const auto& r : rows) {
      if (i >= r.per_rep.size()) continue;
      out << i + 1 << ',' << to_string(r.method) << ',' << (r.per_rep[i] ? format_double(*r.per_rep[i]) : "NA")
          << '\n';
    }
  }
  return out.str();
}

std::string link_plot_csv(const ModelState& state, const Dataset& data) {
  std::ostringstream out;
  out << "kind,t,value\n";
  constexpr int kGrid = 512;
  for (int k = 0; k < kGrid; ++k) {
    const double t = -1.0 + 2.0 * k / (kGrid - 1);
    out << "grid," << format_double(t) << ',' << format_double(eval_link(state.link, t)) << '\n';
  }
  const Eigen::VectorXd proj = data.x * state.index.values();
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << "data," << format_double(proj[i]) << ',' << format_double(data.y[i]) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

void emit_link_plot(const ModelState& state, const Dataset& data, const std::string& path) {
  write_text_file(path, link_plot_csv(state, data));
}

std::vector<std::string> write_experiment_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                                                  const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::vector<std::string> paths;
  auto put = [&](const std::string& suffix, const std::string& text) {
    const std::string path = (base / (spec.name + suffix)).string();
    write_text_file(path, text);
    paths.push_back(path);
  };
  put("_summary.csv", summarize(result.rows, SummaryFormat::Csv));
  put("_summary.md", summarize(result.rows, SummaryFormat::Markdown));
  put("_raw.csv", raw_csv(result.rows));
  if (result.link_plot) put("_linkplot.csv", link_plot_csv(result.link_plot->state, result.link_plot->train));
  return paths;
}

PosteriorOracleReport run_posterior_oracle(const PosteriorOracleSpec& spec) {
  if (spec.p < 1 || spec.p > 16) throw std::invalid_argument("oracle check supports 1 <= p <= 16");
  const Dataset data = simulate({SyntheticModel::SI, spec.n, spec.p, 0.2, splitmix64(spec.seed ^ 0x0DA7AULL)});

  PosteriorOracleReport report;
  const int sets = (1 << spec.p) - 1;
  for (int mask = 1; mask <= sets; ++mask) {
    std::vector<int> support;
    for (int j = 0; j < spec.p; ++j) {
      if (mask & (1 << j)) support.push_back(j);
    }
    report.supports.push_back(support);
  }
  auto mask_of = [](const std::vector<int>& support) {
    int mask = 0;
    for (int j : support) mask |= 1 << j;
    return mask;
  };

  GibbsConfig cfg;
  cfg.lambda = spec.lambda;
  cfg.C = spec.C;
  cfg.s = spec.s;
  cfg.steps = spec.steps;
  Rng chain_rng(splitmix64(spec.seed ^ 0xC4A1ULL));
  const ModelState init =
      make_state(data, IndexVector::unit(spec.p, 0), LinkCoeffs{Eigen::VectorXd::Constant(1, data.y.mean())});
  const ChainTrace trace = run_chain(data, cfg, init, chain_rng, {true, 1.0 - spec.burn_in});
  report.chain_probs.assign(static_cast<std::size_t>(sets), 0.0);
  for (const ModelState& st : trace.tail_states) {
    report.chain_probs[static_cast<std::size_t>(mask_of(st.index.support()) - 1)] += 1.0;
    report.chain_mean_risk += st.risk;
  }
  const auto kept = static_cast<double>(trace.tail_states.size());
  for (double& v : report.chain_probs) v /= kept;
  report.chain_mean_risk /= kept;

  Rng is_rng(splitmix64(spec.seed ^ 0x15ULL));
  std::vector<double> log_w(static_cast<std::size_t>(spec.draws));
  std::vector<double> risks(log_w.size());
  std::vector<int> masks(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const ModelState st = sample_prior(spec.p, spec.n, spec.C, is_rng);
    risks[i] = empirical_risk(data, st.index, st.link);
    log_w[i] = -spec.lambda * risks[i];
    masks[i] = mask_of(st.index.support());
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  report.is_probs.assign(static_cast<std::size_t>(sets), 0.0);
  double total = 0.0;
  double total_sq = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const double w = std::exp(log_w[i] - top);
    total += w;
    total_sq += w * w;
    report.is_probs[static_cast<std::size_t>(masks[i] - 1)] += w;
    report.is_mean_risk += w * risks[i];
  }
  for (double& v : report.is_probs) v /= total;
  report.is_mean_risk /= total;
  report.is_ess = total * total / total_sq;

  for (int k = 0; k < sets; ++k) {
    report.max_prob_diff = std::max(report.max_prob_diff, std::abs(report.chain_probs[k] - report.is_probs[k]));
  }
  report.risk_rel_diff = std::abs(report.chain_mean_risk - report.is_mean_risk) / report.is_mean_risk;
  report.passed = report.max_prob_diff <= spec.prob_tol && report.risk_rel_diff <= spec.risk_rel_tol;
  return report;
}

}  // namespace sparse_si

#include "sparse_si/sampler.hpp"

#include "sparse_si/baselines.hpp"
#include "sparse_si/prior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace sparse_si {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int level_of(KernelFamily family, const ModelState& state) {
  return family == KernelFamily::K1 ? state.index.support_size() : state.link.m();
}

bool move_available(Move move, int level, int max_level) {
  switch (move) {
    case Move::Minus: return level > 1;
    case Move::Plus: return level < max_level;
    case Move::Eq: return true;
  }
  return false;
}

double log_prior_total(const ModelState& state, long n, double C) {
  const double link = log_prior_link(state.link, n, C);
  if (link == -kInf) return -kInf;
  return log_prior_index(state.index) + link;
}

// Position of `value` in a sorted vector, or -1.
int position_of(const std::vector<int>& sorted, int value) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  return (it != sorted.end() && *it == value) ? static_cast<int>(it - sorted.begin()) : -1;
}

// Transition-density part of the birth move small -> big (index gains one
// coordinate j, link dimension kept), i.e.
//   log q_death(small | big) - log q_birth(big | small) + log |Jacobian|,
// without prior or mixture-probability terms. +infinity if the birth move
// cannot produce `big` (|tau_j| >= delta).
//
// Birth: tau_j = v with v ~ U(-delta, delta), tau_i = (1 - |v|) theta_i on the
// old support, then the sign convention. In free coordinates (all support
// coordinates but the first) the map (theta, v) -> tau has Jacobian
// (1 - |v|)^(k-1); converting face Lebesgue to Hausdorff measure adds
// sqrt((k+1)/k).
double birth_terms(const Dataset& data, const ModelState& small, const ModelState& big, const GibbsConfig& cfg) {
  const auto& small_support = small.index.support();
  const auto& big_support = big.index.support();
  if (big_support.size() != small_support.size() + 1 || small.link.m() != big.link.m()) {
    throw std::logic_error("birth move must add exactly one coordinate and keep the link dimension");
  }
  int added = -1;
  for (int j : big_support) {
    if (position_of(small_support, j) < 0) {
      if (added >= 0) throw std::logic_error("birth move supports differ by more than one coordinate");
      added = j;
    }
  }
  if (added < 0) throw std::logic_error("birth move supports are not nested");

  const double v = std::abs(big.index[added]);
  if (v >= cfg.delta) return kInf;
  const auto k = static_cast<double>(small_support.size());

  const Eigen::VectorXd death = removal_weights(big.index, cfg.delta);
  const double log_death_pick = std::log(death[position_of(big_support, added)]);

  const Eigen::VectorXd birth = addition_weights(data, small);
  int slot = 0;
  for (int j = 0; j < added; ++j) {
    if (position_of(small_support, j) < 0) ++slot;
  }
  const double log_birth_pick = std::log(birth[slot]);

  const double log_jacobian = (k - 1.0) * std::log1p(-v) + 0.5 * std::log((k + 1.0) / k);
  return log_death_pick + dens_s_log_density(data, small.index, small.link, cfg.s, cfg.C) - log_birth_pick +
         std::log(2.0 * cfg.delta) - dens_s_log_density(data, big.index, big.link, cfg.s, cfg.C) + log_jacobian;
}

// Chernoff bound on log P(sum_j j|eps_j| >= a) for eps ~ N(0, s^2 I_m), using
// E exp(u|eps|) = 2 exp(u^2 s^2 / 2) Phi(u s). Returns 0 when a is not above the mean.
double chernoff_log_tail(Eigen::Index m, double s, double a) {
  auto log_phi = [](double z) { return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2)); };
  auto slope = [&](double t) {
    double g = -a;
    for (Eigen::Index j = 1; j <= m; ++j) {
      const double z = t * static_cast<double>(j) * s;
      const double mills = std::exp(-0.5 * z * z - log_phi(z)) / std::sqrt(2.0 * std::numbers::pi);
      g += static_cast<double>(j) * s * (z + mills);
    }
    return g;
  };
  if (slope(0.0) >= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index j = 1; j <= m; ++j) sum_sq += static_cast<double>(j * j);
  double lo = 0.0;
  double hi = a / (s * s * sum_sq);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  double bound = -lo * a;
  for (Eigen::Index j = 1; j <= m; ++j) {
    const double z = lo * static_cast<double>(j) * s;
    bound += std::numbers::ln2 + 0.5 * z * z + log_phi(z);
  }
  return std::min(bound, 0.0);
}

// Column j holds 10^4 fixed standard normal draws. Every truncation-mass
// estimate reuses the same draws, which makes it a smooth deterministic
// function of its arguments.
const Eigen::VectorXd& normal_table_column(Eigen::Index j) {
  static std::mutex mutex;
  static std::deque<Eigen::VectorXd> columns;
  std::lock_guard<std::mutex> lock(mutex);
  while (static_cast<Eigen::Index>(columns.size()) <= j) {
    Rng local(0x7472756e63ULL + columns.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd col(10000);
    for (auto& v : col) v = normal(local);
    columns.push_back(std::move(col));
  }
  return columns[static_cast<std::size_t>(j)];
}

// sum_j j |center_j + s z_j| over the rows of the normal table.
Eigen::ArrayXd weighted_l1_samples(const Eigen::VectorXd& center, double s) {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(normal_table_column(0).size());
  for (Eigen::Index j = 0; j < center.size(); ++j) {
    acc += static_cast<double>(j + 1) * (center[j] + s * normal_table_column(j).array()).abs();
  }
  return acc;
}

}  // namespace

std::string to_string(KernelChoice c) {
  std::string out = c.family == KernelFamily::K1 ? "k1" : "k2";
  switch (c.move) {
    case Move::Minus: return out + "-";
    case Move::Eq: return out + "=";
    case Move::Plus: return out + "+";
  }
  return out;
}

KernelChoice reverse(KernelChoice c) {
  if (c.move == Move::Plus) return {c.family, Move::Minus};
  if (c.move == Move::Minus) return {c.family, Move::Plus};
  return c;
}

double ChainTrace::acceptance_rate() const {
  if (accept_flags.empty()) return 0.0;
  return static_cast<double>(std::count(accept_flags.begin(), accept_flags.end(), true)) /
         static_cast<double>(accept_flags.size());
}

Eigen::VectorXd least_squares_coeffs(const Dataset& data, const IndexVector& index, int m) {
  if (m < 1 || m > data.n()) throw std::invalid_argument("least_squares_coeffs: m must lie in [1, n]");
  const Eigen::MatrixXd design = design_matrix(Eigen::VectorXd(data.x * index.values()), m);
  Eigen::MatrixXd gram = design.transpose() * design;
  const double jitter = 1e-8 * gram.trace() / m;
  gram.diagonal().array() += jitter;
  return gram.ldlt().solve(design.transpose() * data.y);
}

double log_truncation_mass(const Eigen::VectorXd& center, double s, double C) {
  const double radius = C + 1.0;
  const auto m = center.size();
  double center_norm = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) center_norm += static_cast<double>(j + 1) * std::abs(center[j]);
  // Outside the ball only if sum_j j|eps_j| exceeds radius - center_norm.
  if (chernoff_log_tail(m, s, radius - center_norm) < -40.0) return 0.0;

  if (m == 1) {
    const double c = center[0];
    const double upper = 0.5 * std::erfc(-(radius - c) / (s * std::numbers::sqrt2));
    const double lower = 0.5 * std::erfc(-(-radius - c) / (s * std::numbers::sqrt2));
    return std::log(std::max(upper - lower, std::numeric_limits<double>::min()));
  }

  const Eigen::ArrayXd norms = weighted_l1_samples(center, s);
  const auto inside = (norms <= radius).count();
  return std::log(static_cast<double>(std::max<Eigen::Index>(inside, 1)) / static_cast<double>(norms.size()));
}

LinkDraw dens_s_sample(const Dataset& data, const IndexVector& index, int m, double s, double C, Rng& rng) {
  if (!(s > 0.0)) throw std::invalid_argument("dens_s_sample: s must be positive");
  const Eigen::VectorXd center = least_squares_coeffs(data, index, m);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Eigen::VectorXd noise(m);
    for (int j = 0; j < m; ++j) noise[j] = normal(rng);
    LinkCoeffs link{center + s * noise};
    if (link.weighted_l1() <= C + 1.0) {
      const double log_density = -m * std::log(s * std::sqrt(2.0 * std::numbers::pi)) - 0.5 * noise.squaredNorm() -
                                 log_truncation_mass(center, s, C);
      return {std::move(link), log_density};
    }
  }
  throw ProposalFailure("link proposal rejected 1000 times: increase C or decrease s");
}

double dens_s_log_density(const Dataset& data, const IndexVector& index, const LinkCoeffs& link, double s,
                          double C) {
  const int m = link.m();
  if (!(link.weighted_l1() <= C + 1.0)) return -kInf;
  const Eigen::VectorXd center = least_squares_coeffs(data, index, m);
  return -m * std::log(s * std::sqrt(2.0 * std::numbers::pi)) - (link.beta - center).squaredNorm() / (2.0 * s * s) -
         log_truncation_mass(center, s, C);
}

Eigen::VectorXd removal_weights(const IndexVector& index, double delta) {
  const auto& support = index.support();
  if (support.size() < 2) throw std::invalid_argument("removal_weights: support must have at least 2 coordinates");
  Eigen::VectorXd w(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double a = std::abs(index[support[k]]);
    w[k] = a < delta ? std::exp(-a) : 0.0;
  }
  const double total = w.sum();
  if (total > 0.0) return w / total;
  return Eigen::VectorXd::Constant(support.size(), 1.0 / static_cast<double>(support.size()));
}

Eigen::VectorXd addition_weights(const Dataset& data, const ModelState& state) {
  const auto& support = state.index.support();
  const Eigen::Index p = data.p();
  if (static_cast<Eigen::Index>(support.size()) >= p) {
    throw std::invalid_argument("addition_weights: support already covers every coordinate");
  }
  const Eigen::VectorXd resid = data.y - predict(state.index, state.link, data.x);
  Eigen::VectorXd score(p - static_cast<Eigen::Index>(support.size()));
  Eigen::Index slot = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (position_of(support, static_cast<int>(j)) >= 0) continue;
    score[slot++] = std::abs(data.x.col(j).dot(resid));
  }
  const double top = score.maxCoeff();
  Eigen::VectorXd w = (score.array() - top).exp();
  return w / w.sum();
}

double move_probability(Move move, int level, int max_level) {
  if (!move_available(move, level, max_level)) return 0.0;
  const double minus = level > 1 ? 1.0 : 0.0;
  const double plus = level < max_level ? 1.0 : 0.0;
  const double total = minus + 2.0 + plus;
  return (move == Move::Eq ? 2.0 : 1.0) / total;
}

double eq_index_log_density(const Eigen::VectorXd& from, const Eigen::VectorXd& to, double delta) {
  if (from.size() != to.size() || from.size() == 0) {
    throw std::invalid_argument("eq_index_log_density: support vectors must have equal nonzero length");
  }
  const auto k = static_cast<double>(from.size());
  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    double lo = 0.0;
    double hi = kInf;
    for (Eigen::Index i = 0; i < from.size() && lo < hi; ++i) {
      const double a = sign * to[i];
      const double l = from[i] - delta;
      const double u = from[i] + delta;
      if (a > 0.0) {
        lo = std::max(lo, l / a);
        hi = std::min(hi, u / a);
      } else if (a < 0.0) {
        lo = std::max(lo, u / a);
        hi = std::min(hi, l / a);
      } else if (l > 0.0 || u < 0.0) {
        hi = lo;
      }
    }
    if (hi > lo && std::isfinite(hi)) total += (std::pow(hi, k) - std::pow(lo, k)) / k;
  }
  return total > 0.0 ? std::log(total) : -kInf;
}

double log_correction(const Dataset& data, const ModelState& from, const ModelState& to, KernelChoice choice,
                      const GibbsConfig& cfg) {
  const long n = static_cast<long>(data.n());
  const auto p = static_cast<int>(data.p());
  const int max_level = choice.family == KernelFamily::K1 ? p : static_cast<int>(n);
  const int from_level = level_of(choice.family, from);
  const int to_level = level_of(choice.family, to);

  const double prior_ratio = log_prior_total(to, n, cfg.C) - log_prior_total(from, n, cfg.C);
  const double mixture_ratio = std::log(move_probability(reverse(choice).move, to_level, max_level)) -
                               std::log(move_probability(choice.move, from_level, max_level));

  double transition = 0.0;
  if (choice.family == KernelFamily::K1) {
    switch (choice.move) {
      case Move::Eq: {
        if (from.index.support() != to.index.support() || from.link.m() != to.link.m()) {
          throw std::logic_error("k1= move must keep the support and link dimension");
        }
        const Eigen::VectorXd a = from.index.support_values();
        const Eigen::VectorXd b = to.index.support_values();
        transition = eq_index_log_density(b, a, cfg.delta) - eq_index_log_density(a, b, cfg.delta) +
                     dens_s_log_density(data, from.index, from.link, cfg.s, cfg.C) -
                     dens_s_log_density(data, to.index, to.link, cfg.s, cfg.C);
        break;
      }
      case Move::Plus: transition = birth_terms(data, from, to, cfg); break;
      case Move::Minus: transition = -birth_terms(data, to, from, cfg); break;
    }
  } else {
    if (!(from.index == to.index)) throw std::logic_error("k2 moves must keep the index");
    const int expected = from.link.m() + (choice.move == Move::Plus ? 1 : choice.move == Move::Minus ? -1 : 0);
    if (to.link.m() != expected) throw std::logic_error("k2 move changes the link dimension inconsistently");
    transition = dens_s_log_density(data, from.index, from.link, cfg.s, cfg.C) -
                 dens_s_log_density(data, to.index, to.link, cfg.s, cfg.C);
  }
  return prior_ratio + mixture_ratio + transition;
}

Proposal propose(const Dataset& data, const ModelState& state, KernelChoice choice, const GibbsConfig& cfg,
                 Rng& rng) {
  const Eigen::Index p = data.p();
  const int max_level = choice.family == KernelFamily::K1 ? static_cast<int>(p) : static_cast<int>(data.n());
  if (!move_available(choice.move, level_of(choice.family, state), max_level)) {
    throw std::logic_error("move " + to_string(choice) + " is not available at this state");
  }

  const int m = state.link.m();
  std::uniform_real_distribution<double> unif(-cfg.delta, cfg.delta);

  std::optional<IndexVector> new_index;
  int new_m = m;

  if (choice.family == KernelFamily::K1) {
    const auto& support = state.index.support();
    switch (choice.move) {
      case Move::Eq: {
        constexpr int kMaxRetries = 100;
        for (int attempt = 0; attempt < kMaxRetries && !new_index; ++attempt) {
          Eigen::VectorXd raw = Eigen::VectorXd::Zero(p);
          bool degenerate = false;
          for (int j : support) {
            raw[j] = state.index[j] + unif(rng);
            degenerate = degenerate || raw[j] == 0.0;
          }
          if (!degenerate) new_index = IndexVector::normalized(raw);
        }
        if (!new_index) throw std::runtime_error("k1= perturbation produced a zero coordinate 100 times");
        break;
      }
      case Move::Plus: {
        const Eigen::VectorXd w = addition_weights(data, state);
        std::discrete_distribution<int> pick(w.data(), w.data() + w.size());
        const int slot = pick(rng);
        int added = -1;
        for (int j = 0, seen = 0; j < p; ++j) {
          if (position_of(support, j) >= 0) continue;
          if (seen++ == slot) {
            added = j;
            break;
          }
        }
        double v = 0.0;
        while (v == 0.0) v = unif(rng);
        Eigen::VectorXd raw = (1.0 - std::abs(v)) * state.index.values();
        raw[added] = v;
        new_index = IndexVector::normalized(raw);
        break;
      }
      case Move::Minus: {
        const Eigen::VectorXd w = removal_weights(state.index, cfg.delta);
        std::discrete_distribution<int> pick(w.data(), w.data() + w.size());
        Eigen::VectorXd raw = state.index.values();
        raw[support[pick(rng)]] = 0.0;
        new_index = IndexVector::normalized(raw);
        break;
      }
    }
  } else {
    new_index = state.index;
    if (choice.move == Move::Plus) ++new_m;
    if (choice.move == Move::Minus) --new_m;
  }

  LinkDraw draw = dens_s_sample(data, *new_index, new_m, cfg.s, cfg.C, rng);
  Proposal out{make_state(data, std::move(*new_index), std::move(draw.link)), 0.0, choice};
  out.log_correction = log_correction(data, state, out.candidate, choice, cfg);
  return out;
}

StepResult accept_step(const ModelState& state, const Proposal& proposal, double lambda, Rng& rng) {
  const double delta_risk = proposal.candidate.risk - state.risk;
  const double log_alpha = (lambda == 0.0 ? 0.0 : -lambda * delta_risk) + proposal.log_correction;
  bool accept = false;
  if (log_alpha >= 0.0) {
    accept = true;
  } else if (log_alpha > -kInf) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    accept = std::log(unif(rng)) < log_alpha;
  }
  return accept ? StepResult{proposal.candidate, true} : StepResult{state, false};
}

KernelChoice draw_move(KernelFamily family, const ModelState& state, Eigen::Index p, Eigen::Index n, Rng& rng) {
  const int max_level = family == KernelFamily::K1 ? static_cast<int>(p) : static_cast<int>(n);
  const int level = level_of(family, state);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  for (Move move : {Move::Minus, Move::Eq, Move::Plus}) {
    const double w = move_probability(move, level, max_level);
    if (u < w) return {family, move};
    u -= w;
  }
  return {family, Move::Eq};
}

ChainTrace run_chain(const Dataset& data, const GibbsConfig& cfg, const ModelState& init, Rng& rng,
                     const ChainOptions& opts) {
  const int steps = cfg.steps.value_or(0);
  const double lambda = cfg.lambda.value_or(4.0 * static_cast<double>(data.n()));
  ChainTrace trace;
  trace.risks.reserve(steps);
  trace.support_sizes.reserve(steps);
  trace.m_values.reserve(steps);
  trace.accept_flags.reserve(steps);
  trace.moves.reserve(steps);

  const int tail_start = steps - static_cast<int>(std::ceil(opts.tail_fraction * steps));
  ModelState state = init;
  for (int t = 1; t <= steps; ++t) {
    const KernelFamily family = (t % 2 == 1) ? KernelFamily::K1 : KernelFamily::K2;
    const KernelChoice choice = draw_move(family, state, data.p(), data.n(), rng);
    bool accepted = false;
    try {
      const Proposal proposal = propose(data, state, choice, cfg, rng);
      StepResult step = accept_step(state, proposal, lambda, rng);
      state = std::move(step.state);
      accepted = step.accepted;
    } catch (const ProposalFailure&) {
      ++trace.proposal_failures;
    }
    trace.risks.push_back(state.risk);
    trace.support_sizes.push_back(state.index.support_size());
    trace.m_values.push_back(state.link.m());
    trace.accept_flags.push_back(accepted);
    trace.moves.push_back(choice);
    if (opts.keep_tail && t > tail_start) trace.tail_states.push_back(state);
  }
  trace.final_state = std::move(state);
  return trace;
}

bool stabilization_diag(const ChainTrace& trace, int window, double tol) {
  const auto len = static_cast<long>(trace.risks.size());
  if (window < 1 || len < 2L * window) {
    throw std::invalid_argument("stabilization_diag: trace shorter than two windows");
  }
  double last = 0.0;
  double previous = 0.0;
  for (long i = len - window; i < len; ++i) last += trace.risks[i];
  for (long i = len - 2L * window; i < len - window; ++i) previous += trace.risks[i];
  last /= window;
  previous /= window;
  return std::abs(last - previous) <= tol * (1.0 + last);
}

bool stabilization_diag(const ChainTrace& trace) {
  const auto steps = static_cast<int>(trace.risks.size());
  return stabilization_diag(trace, (steps + 9) / 10, 1e-3);
}

std::uint64_t chain_seed(std::uint64_t seed, int chain_id) {
  return seed ^ (static_cast<std::uint64_t>(chain_id) * 0x9E3779B97F4A7C15ULL);
}

namespace {

int thread_cap(const GibbsConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("SPARSE_SI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

FitResult fit(const Dataset& data, const GibbsConfig& cfg_in, const std::optional<IndexVector>& warm_index) {
  validate_dataset(data);
  const GibbsConfig cfg = cfg_in.resolved(data.n(), data.p());

  FitResult result;
  FitDiagnostics& diag = result.diagnostics;
  diag.lambda = *cfg.lambda;
  diag.steps = *cfg.steps;
  diag.warm_start = *cfg.warm_start;

  std::optional<IndexVector> start = warm_index;
  if (!start) {
    if (diag.warm_start == WarmStart::Hhi) {
      start = hhi_fit(data).index;
    } else if (diag.warm_start == WarmStart::LassoDirection) {
      start = lasso_direction(data, default_lasso_xi(sample_sd(data.y) / 2.0, data.n(), data.p()));
      diag.warm_start_fallback = !start.has_value();
    }
  }

  const int chains = cfg.chains;
  std::vector<ChainTrace> traces(chains);
  std::vector<std::exception_ptr> errors(chains);
  const ChainOptions opts{cfg.average_tail, 0.2};

  auto run_one = [&](int id) {
    try {
      Rng rng(chain_seed(cfg.seed, id));
      ModelState init = start ? make_state(data, *start, LinkCoeffs{Eigen::VectorXd::Constant(1, data.y.mean())})
                              : [&] {
                                  ModelState draw = sample_prior(data.p(), static_cast<long>(data.n()), cfg.C, rng);
                                  return make_state(data, std::move(draw.index), std::move(draw.link));
                                }();
      traces[id] = run_chain(data, cfg, init, rng, opts);
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };

  const int cap = std::min(thread_cap(cfg), chains);
  if (cap <= 1) {
    for (int id = 0; id < chains; ++id) run_one(id);
  } else {
    for (int first = 0; first < chains; first += cap) {
      std::vector<std::thread> pool;
      for (int id = first; id < std::min(chains, first + cap); ++id) pool.emplace_back(run_one, id);
      for (auto& th : pool) th.join();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int best = 0;
  for (int id = 0; id < chains; ++id) {
    const ChainTrace& trace = traces[id];
    ChainSummary summary;
    summary.seed = chain_seed(cfg.seed, id);
    summary.final_risk = trace.final_state.risk;
    summary.acceptance_rate = trace.acceptance_rate();
    summary.stabilized = trace.risks.size() >= 2 && stabilization_diag(trace);
    diag.chains.push_back(summary);
    if (trace.final_state.risk < traces[best].final_state.risk) best = id;
  }
  diag.selected_chain = best;
  result.state = traces[best].final_state;
  result.tail_states = std::move(traces[best].tail_states);
  return result;
}

Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& x) {
  if (fit.tail_states.empty()) return predict(fit.state.index, fit.state.link, x);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.rows());
  for (const ModelState& s : fit.tail_states) acc += predict(s.index, s.link, x);
  return acc / static_cast<double>(fit.tail_states.size());
}

}  // namespace sparse_si

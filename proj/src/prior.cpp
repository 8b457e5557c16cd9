#include "sparse_si/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sparse_si {

namespace {

const double kLog10 = std::log(10.0);

// log(1 - 10^-count), the normalizer of a geometric weight truncated at count.
double log_truncated_geometric_mass(long count) {
  return std::log1p(-std::pow(10.0, -static_cast<double>(count)));
}

// Draws a level in [1, max_level] with probability proportional to 10^-level.
long sample_geometric_level(long max_level, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double total = -std::expm1(-kLog10 * static_cast<double>(max_level));
  double u = unif(rng) * total;
  for (long level = 1; level <= max_level; ++level) {
    // mass of this level relative to sum_{l>=1} 10^-l = 1/9
    const double w = 0.9 * std::pow(10.0, -static_cast<double>(level - 1));
    if (u < w || level == max_level) return level;
    u -= w;
  }
  return max_level;
}

}  // namespace

double log_ball_volume(int m, double radius) {
  if (m < 1 || !(radius > 0.0)) throw std::invalid_argument("log_ball_volume: need m >= 1 and radius > 0");
  return m * std::log(2.0 * radius) - 2.0 * std::lgamma(m + 1.0);
}

double log_face_measure(int k) {
  if (k < 1) throw std::invalid_argument("log_face_measure: k must be positive");
  return (k - 1) * std::numbers::ln2 + 0.5 * std::log(static_cast<double>(k)) - std::lgamma(static_cast<double>(k));
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_prior_index(const IndexVector& index) {
  const int k = index.support_size();
  const auto p = static_cast<int>(index.dim());
  if (k < 1) throw std::invalid_argument("log_prior_index: empty support");
  return -k * kLog10 - log_binomial(p, k) - log_truncated_geometric_mass(p) - log_face_measure(k);
}

double log_prior_link(const LinkCoeffs& link, long n, double C) {
  const int m = link.m();
  if (m < 1 || m > n) throw std::invalid_argument("log_prior_link: link dimension outside [1, n]");
  if (!(link.weighted_l1() <= C + 1.0)) return -std::numeric_limits<double>::infinity();
  return -m * kLog10 - log_truncated_geometric_mass(n) - log_ball_volume(m, C + 1.0);
}

PriorLogDensity log_prior(const ModelState& state, long n, double C) {
  return {log_prior_index(state.index), log_prior_link(state.link, n, C)};
}

IndexVector sample_index_face(const std::vector<int>& support, Eigen::Index p, Rng& rng) {
  if (support.empty()) throw std::invalid_argument("sample_index_face: empty support");
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(p);
  // Dirichlet(1,...,1) magnitudes via normalized exponentials.
  double total = 0.0;
  for (int j : support) {
    double e = 0.0;
    while (e == 0.0) e = expo(rng);
    values[j] = e;
    total += e;
  }
  for (std::size_t k = 0; k < support.size(); ++k) {
    values[support[k]] /= total;
    if (k > 0 && coin(rng)) values[support[k]] = -values[support[k]];
  }
  return IndexVector::normalized(values);
}

LinkCoeffs sample_uniform_ball(int m, double radius, Rng& rng) {
  if (m < 1 || !(radius > 0.0)) throw std::invalid_argument("sample_uniform_ball: need m >= 1 and radius > 0");
  Eigen::VectorXd beta(m);

  // Rejection from the bounding box accepts with probability 1/m!.
  constexpr int kMaxAttempts = 10000;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    double norm = 0.0;
    for (int j = 0; j < m; ++j) {
      beta[j] = unif(rng) * radius / (j + 1);
      norm += (j + 1) * std::abs(beta[j]);
    }
    if (norm <= radius) return LinkCoeffs{beta};
  }

  // Exact fallback: with u_j = j beta_j the ball is the plain l1 ball. Uniform
  // points in it are radius * (E_1, ..., E_m) / (E_1 + ... + E_{m+1}) with
  // iid unit exponentials and independent random signs.
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd e(m + 1);
  for (int j = 0; j <= m; ++j) e[j] = expo(rng);
  const double total = e.sum();
  for (int j = 0; j < m; ++j) {
    const double u = radius * e[j] / total;
    beta[j] = (coin(rng) ? u : -u) / (j + 1);
  }
  return LinkCoeffs{beta};
}

ModelState sample_prior(Eigen::Index p, long n, double C, Rng& rng) {
  if (p < 1 || n < 1) throw std::invalid_argument("sample_prior: need p >= 1 and n >= 1");
  const auto k = static_cast<int>(sample_geometric_level(static_cast<long>(p), rng));

  // Uniform k-subset by partial Fisher-Yates.
  std::vector<int> pool(static_cast<std::size_t>(p));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(p) - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  std::vector<int> support(pool.begin(), pool.begin() + k);
  std::sort(support.begin(), support.end());

  IndexVector index = sample_index_face(support, p, rng);
  const auto m = static_cast<int>(sample_geometric_level(n, rng));
  LinkCoeffs link = sample_uniform_ball(m, C + 1.0, rng);
  return ModelState{std::move(index), std::move(link), 0.0};
}

}  // namespace sparse_si

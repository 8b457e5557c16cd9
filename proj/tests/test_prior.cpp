#include "doctest.h"

#include "sparse_si/prior.hpp"

#include <cmath>
#include <map>

using namespace sparse_si;

namespace {

// Hit-rate estimate of the volume of {beta : sum_j j |beta_j| <= radius}.
double mc_ball_volume(int m, double radius, long draws, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double box = 1.0;
  for (int j = 1; j <= m; ++j) box *= 2.0 * radius / j;
  long hits = 0;
  for (long d = 0; d < draws; ++d) {
    double norm = 0.0;
    for (int j = 1; j <= m; ++j) norm += j * std::abs(unif(rng) * radius / j);
    hits += norm <= radius;
  }
  return box * static_cast<double>(hits) / static_cast<double>(draws);
}

// Hausdorff measure of {theta in R^k : |theta|_1 = 1, theta_1 > 0} from the
// volume of the half shell 1 <= |x|_1 <= 1 + eps. The l1 norm has Euclidean
// gradient norm sqrt(k) on every face, and the shell volume scales as
// ((1 + eps)^k - 1) / k times the surface measure over that gradient norm.
double mc_face_measure(int k, long draws, std::uint64_t seed) {
  const double eps = 0.2;
  const double r = 1.0 + eps;
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-r, r);
  long hits = 0;
  for (long d = 0; d < draws; ++d) {
    double norm = 0.0;
    double first = 0.0;
    for (int j = 0; j < k; ++j) {
      const double v = unif(rng);
      if (j == 0) first = v;
      norm += std::abs(v);
    }
    hits += first > 0.0 && norm >= 1.0 && norm <= r;
  }
  const double shell = std::pow(2.0 * r, k) * static_cast<double>(hits) / static_cast<double>(draws);
  return shell * std::sqrt(static_cast<double>(k)) * k / (std::pow(r, k) - 1.0);
}

}  // namespace

TEST_SUITE("prior") {

TEST_CASE("ball volume closed form") {
  CHECK(log_ball_volume(1, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(std::abs(log_ball_volume(2, 1.0)) < 1e-15);
  CHECK(log_ball_volume(3, 2.0) == doctest::Approx(3 * std::log(4.0) - 2 * std::log(6.0)));
}

TEST_CASE("ball volume against Monte Carlo") {
  CHECK(mc_ball_volume(2, 1.0, 1000000, 1) == doctest::Approx(std::exp(log_ball_volume(2, 1.0))).epsilon(0.01));
  CHECK(mc_ball_volume(3, 2.0, 1000000, 2) == doctest::Approx(std::exp(log_ball_volume(3, 2.0))).epsilon(0.02));
  CHECK(mc_ball_volume(4, 1.5, 1000000, 3) == doctest::Approx(std::exp(log_ball_volume(4, 1.5))).epsilon(0.02));
}

TEST_CASE("face measure closed form") {
  CHECK(log_face_measure(1) == 0.0);
  CHECK(log_face_measure(2) == doctest::Approx(std::log(2.0 * std::sqrt(2.0))));
  CHECK(log_face_measure(3) == doctest::Approx(std::log(4.0 * std::sqrt(3.0) / 2.0)));
}

TEST_CASE("face measure against Monte Carlo") {
  CHECK(mc_face_measure(2, 2000000, 4) == doctest::Approx(std::exp(log_face_measure(2))).epsilon(0.01));
  CHECK(mc_face_measure(3, 2000000, 5) == doctest::Approx(std::exp(log_face_measure(3))).epsilon(0.02));
}

TEST_CASE("index prior density") {
  CHECK(log_prior_index(IndexVector::unit(1, 0)) == doctest::Approx(-std::log(10.0) - std::log(0.9)));
  const IndexVector two = IndexVector::from_values(Eigen::Vector4d(0.0, 0.25, 0.0, -0.75));
  const double expected =
      -2 * std::log(10.0) - std::log(6.0) - std::log(1 - 1e-4) - std::log(2 * std::sqrt(2.0));
  CHECK(log_prior_index(two) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("index prior total mass is the same for every p") {
  // Sum over supports of face measure times density, accumulated in long double.
  // The geometric weights 10^-i over i = 1..p, divided by 1 - 10^-p, add up to 1/9.
  for (int p = 1; p <= 6; ++p) {
    long double total = 0.0L;
    for (int mask = 1; mask < (1 << p); ++mask) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
      int k = 0;
      for (int j = 0; j < p; ++j)
        if (mask & (1 << j)) v[j] = 1.0, ++k;
      const IndexVector index = IndexVector::normalized(v);
      total += std::exp(static_cast<long double>(log_prior_index(index)) + log_face_measure(k));
    }
    CHECK(std::abs(static_cast<double>(total) - 1.0 / 9.0) < 1e-12);
  }
}

TEST_CASE("link prior density") {
  const double l10 = std::log(10.0);
  CHECK(log_prior_link(LinkCoeffs{Eigen::VectorXd::Constant(1, 0.3)}, 10, 1.0) ==
        doctest::Approx(-l10 - std::log(1 - 1e-10) - std::log(4.0)));
  CHECK(log_prior_link(LinkCoeffs{Eigen::Vector2d(0.1, 0.1)}, 10, 0.0) ==
        doctest::Approx(-2 * l10 - std::log(1 - 1e-10)));
  // Just outside the ball of radius C + 1 = 2.
  const LinkCoeffs outside{Eigen::Vector2d(1.0 + 1e-6, 0.5)};
  CHECK(log_prior_link(outside, 10, 1.0) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_prior_link(LinkCoeffs{Eigen::VectorXd::Zero(11)}, 10, 1.0), std::invalid_argument);
}

TEST_CASE("face sampling") {
  Rng rng(7);
  const IndexVector single = sample_index_face({2}, 5, rng);
  CHECK(single == IndexVector::unit(5, 2));

  constexpr int kDraws = 100000;
  double mean_abs = 0.0;
  int negative_second = 0;
  for (int d = 0; d < kDraws; ++d) {
    const IndexVector v = sample_index_face({0, 1, 3}, 4, rng);
    REQUIRE(v.support() == std::vector<int>{0, 1, 3});
    REQUIRE(v.values().lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
    mean_abs += std::abs(v[1]);
    const IndexVector w = sample_index_face({1, 2}, 3, rng);
    REQUIRE(w[1] > 0.0);
    negative_second += w[2] < 0.0;
  }
  CHECK(mean_abs / kDraws == doctest::Approx(1.0 / 3.0).epsilon(0.03));
  CHECK(static_cast<double>(negative_second) / kDraws == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform ball sampling stays inside and covers the ball") {
  Rng rng(8);
  for (int m : {1, 3, 9, 12}) {
    double mean_first = 0.0;
    for (int d = 0; d < 2000; ++d) {
      const LinkCoeffs b = sample_uniform_ball(m, 2.0, rng);
      REQUIRE(b.m() == m);
      REQUIRE(b.weighted_l1() <= 2.0 + 1e-12);
      mean_first += b.beta[0];
    }
    CHECK(std::abs(mean_first / 2000) < 0.1);
  }
  // For m = 2 and radius 1, |beta_1| has density 2 (1 - x) on [0, 1], mean 1/3.
  double mean_abs = 0.0;
  for (int d = 0; d < 100000; ++d) mean_abs += std::abs(sample_uniform_ball(2, 1.0, rng).beta[0]);
  CHECK(mean_abs / 100000 == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("prior draws follow the geometric level weights") {
  Rng rng(9);
  std::map<int, long> support_counts;
  std::map<int, long> m_counts;
  for (int d = 0; d < 100000; ++d) {
    const ModelState s = sample_prior(5, 40, 10.0, rng);
    REQUIRE(s.index.values().lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(s.index[s.index.support().front()] > 0.0);
    REQUIRE(s.link.weighted_l1() <= 11.0 + 1e-9);
    ++support_counts[s.index.support_size()];
    ++m_counts[s.link.m()];
  }
  const double support_ratio = static_cast<double>(support_counts[1]) / support_counts[2];
  const double m_ratio = static_cast<double>(m_counts[1]) / m_counts[2];
  CHECK(support_ratio == doctest::Approx(10.0).epsilon(0.05));
  CHECK(m_ratio == doctest::Approx(10.0).epsilon(0.05));
}

}

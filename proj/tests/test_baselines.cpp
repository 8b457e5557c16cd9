#include "doctest.h"
#include "test_util.hpp"

#include "sparse_si/baselines.hpp"
#include "sparse_si/data.hpp"

#include <algorithm>
#include <cmath>

using namespace sparse_si;

namespace {

// Exhaustive leave-one-out score for a Gaussian kernel on given points.
double loo_oracle(const Eigen::MatrixXd& pts, const Eigen::VectorXd& y, double h) {
  double score = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index j = 0; j < pts.rows(); ++j) {
      if (j == i) continue;
      const double w = std::exp(-(pts.row(i) - pts.row(j)).squaredNorm() / (h * h));
      num += w * y[j];
      den += w;
    }
    const double r = y[i] - num / den;
    score += r * r;
  }
  return score;
}

double nw_oracle(const Dataset& d, double h, const Eigen::VectorXd& x) {
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    double sq = 0.0;
    for (Eigen::Index j = 0; j < d.p(); ++j) sq += (d.x(i, j) - x[j]) * (d.x(i, j) - x[j]);
    num += std::exp(-sq / (h * h)) * d.y[i];
    den += std::exp(-sq / (h * h));
  }
  return num / den;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("lasso is zero above the critical penalty") {
  const Dataset d = testing::random_dataset(40, 5, 31);
  const double crit = (2.0 / d.n() * (d.x.transpose() * d.y)).cwiseAbs().maxCoeff();
  CHECK(lasso_fit(d, crit * 1.0001).coeffs.lpNorm<1>() == 0.0);
  CHECK(lasso_fit(d, crit * 0.9).coeffs.lpNorm<1>() > 0.0);
  CHECK_FALSE(lasso_direction(d, crit * 2).has_value());
}

TEST_CASE("single-feature lasso against a grid search") {
  Dataset d = testing::random_dataset(30, 1, 32);
  const double xi = 0.05;
  const double fitted = lasso_fit(d, xi).coeffs[0];
  double best = 0.0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int g = -50000; g <= 50000; ++g) {
    const double c = g * 1e-4;
    const double obj = lasso_objective(d, Eigen::VectorXd::Constant(1, c), xi);
    if (obj < best_obj) best_obj = obj, best = c;
  }
  CHECK(std::abs(fitted - best) < 1e-4);
}

TEST_CASE("two-feature lasso against a grid search") {
  // Orthogonal columns.
  Dataset d{Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd(4)};
  d.x << 1, 1, 1, -1, -1, 1, -1, -1;
  d.x *= 0.5;
  d.y << 1.0, 0.2, -0.4, -0.9;
  const double xi = 0.1;
  const Eigen::VectorXd fitted = lasso_fit(d, xi).coeffs;
  Eigen::Vector2d best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int a = -3000; a <= 3000; ++a) {
    for (int b = -3000; b <= 3000; ++b) {
      const Eigen::Vector2d c(a * 1e-3, b * 1e-3);
      double obj = xi * (std::abs(c[0]) + std::abs(c[1]));
      for (int i = 0; i < 4; ++i) {
        const double r = d.y[i] - d.x(i, 0) * c[0] - d.x(i, 1) * c[1];
        obj += r * r / 4.0;
      }
      if (obj < best_obj) best_obj = obj, best = c;
    }
  }
  CHECK((fitted - best).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("lasso satisfies the KKT conditions") {
  const Dataset d = testing::random_dataset(80, 8, 33);
  for (double xi : {0.01, 0.05, 0.2}) {
    const LassoModel m = lasso_fit(d, xi);
    const Eigen::VectorXd grad = 2.0 / d.n() * (d.x.transpose() * (d.y - d.x * m.coeffs));
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      if (m.coeffs[j] != 0.0) {
        CHECK(std::abs(grad[j] - xi * (m.coeffs[j] > 0 ? 1.0 : -1.0)) < 1e-8);
      } else {
        CHECK(std::abs(grad[j]) <= xi + 1e-8);
      }
    }
    for (std::size_t k = 1; k < m.objective_trace.size(); ++k)
      CHECK(m.objective_trace[k] <= m.objective_trace[k - 1] + 1e-15);
  }
}

TEST_CASE("lasso recovers noiseless linear data") {
  std::vector<double> mses;
  for (int rep = 0; rep < 9; ++rep) {
    const Dataset train = simulate({SyntheticModel::Linear, 200, 10, 0.0, static_cast<std::uint64_t>(rep)});
    const Dataset test = simulate({SyntheticModel::Linear, 200, 10, 0.0, static_cast<std::uint64_t>(rep + 100)});
    const LassoModel m = lasso_fit(train, default_lasso_xi(0.0, train.n(), train.p()));
    mses.push_back((lasso_predict(m, test.x) - test.y).squaredNorm() / test.n());
  }
  std::nth_element(mses.begin(), mses.begin() + 4, mses.end());
  CHECK(mses[4] <= 0.005);
}

TEST_CASE("default lasso penalty") {
  CHECK(default_lasso_xi(0.6, 100, 10) == doctest::Approx(0.2 * std::sqrt(std::log(10.0) / 100)));
  CHECK(default_lasso_xi(0.0, 100, 10) == 1e-6);
  CHECK(default_lasso_xi(1.0, 100, 1) == 1e-6);
}

TEST_CASE("Nadaraya-Watson predictions") {
  const Dataset d = testing::random_dataset(15, 3, 34);
  CHECK(nw_predict_at(d, 1e-6, Eigen::VectorXd(d.x.row(4).transpose())) == doctest::Approx(d.y[4]).epsilon(1e-6));

  const Dataset one{d.x.topRows(1), d.y.head(1)};
  CHECK(nw_predict_at(one, 0.3, Eigen::Vector3d(0.9, -0.9, 0.1)) == doctest::Approx(d.y[0]));

  const Eigen::Vector3d x(0.1, -0.2, 0.3);
  CHECK(std::abs(nw_predict_at(d, 0.75, x) - nw_oracle(d, 0.75, x)) < 1e-12);

  // Every weight underflows: fall back to the mean.
  CHECK(nw_predict_at(d, 1e-200, x) == doctest::Approx(d.y.mean()));
}

TEST_CASE("bandwidth grid") {
  const std::vector<double> g = bandwidth_grid(100);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == 1.0);
  CHECK(g[4] == doctest::Approx(0.31640625));
}

TEST_CASE("NW bandwidth selection is the exhaustive minimizer") {
  for (std::uint64_t seed : {35u, 36u, 37u}) {
    const Dataset d = testing::random_dataset(60, 3, seed, 0.3);
    const KernelModel m = nw_select_bandwidth(d);
    const std::vector<double> grid = bandwidth_grid(d.n());
    REQUIRE(m.loo_scores.size() == grid.size());
    std::size_t best = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double oracle = loo_oracle(d.x, d.y, grid[k]);
      CHECK(m.loo_scores[k] == doctest::Approx(oracle).epsilon(1e-12));
      if (oracle < loo_oracle(d.x, d.y, grid[best])) best = k;
    }
    CHECK(m.bandwidth == grid[best]);
  }
}

TEST_CASE("HHI criterion and recovery") {
  const Dataset d = testing::random_dataset(30, 3, 38);
  const Eigen::Vector3d theta(0.5, 0.3, -0.2);
  const Eigen::MatrixXd t = d.x * theta;
  CHECK(hhi_loo_criterion(d, theta, 0.5) == doctest::Approx(loo_oracle(t, d.y, 0.5)).epsilon(1e-12));

  // Noiseless single index with a monotone link.
  Rng rng(39);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Dataset lin{Eigen::MatrixXd(60, 3), Eigen::VectorXd(60)};
  const Eigen::Vector3d truth(0.6, -0.3, 0.1);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) lin.x(i, j) = unif(rng);
    lin.y[i] = truth.dot(lin.x.row(i).transpose());
  }
  const HhiModel m = hhi_fit(lin);
  CHECK((m.index.values() - truth).lpNorm<1>() < 0.2);
  const std::vector<double> grid = bandwidth_grid(60);
  CHECK(std::find(grid.begin(), grid.end(), m.bandwidth) != grid.end());

  // Never worse than the Lasso starting point at the chosen bandwidth.
  const IndexVector init =
      lasso_direction(lin, default_lasso_xi(sample_sd(lin.y) / 2, lin.n(), lin.p())).value_or(IndexVector::unit(3, 0));
  CHECK(m.criterion <= hhi_loo_criterion(lin, init.values(), m.bandwidth));
  CHECK(m.criterion == doctest::Approx(hhi_loo_criterion(lin, m.index.values(), m.bandwidth)));
}

TEST_CASE("HHI predictions") {
  const Dataset d = testing::random_dataset(25, 2, 40);
  HhiModel m;
  m.index = IndexVector::normalized(Eigen::Vector2d(0.7, 0.3));
  m.bandwidth = 1e-6;
  CHECK(hhi_predict_at(m, d, Eigen::VectorXd(d.x.row(3).transpose())) == doctest::Approx(d.y[3]).epsilon(1e-6));

  Dataset flat = d;
  flat.y.setConstant(1.25);
  m.bandwidth = 0.4;
  CHECK(hhi_predict_at(m, flat, Eigen::Vector2d(0.1, 0.2)) == doctest::Approx(1.25));

  m.bandwidth = 0.6;
  const Eigen::Vector2d x(-0.3, 0.5);
  const Eigen::MatrixXd t = d.x * m.index.values();
  const double tx = m.index.values().dot(x);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double w = std::exp(-(tx - t(i, 0)) * (tx - t(i, 0)) / 0.36);
    num += w * d.y[i];
    den += w;
  }
  CHECK(std::abs(hhi_predict_at(m, d, x) - num / den) < 1e-12);
  const Eigen::MatrixXd xs = d.x.topRows(4);
  const Eigen::VectorXd batch = hhi_predict(m, d, xs);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(batch[i] == hhi_predict_at(m, d, Eigen::VectorXd(xs.row(i).transpose())));
}

TEST_CASE("sample standard deviation") {
  CHECK(sample_sd(Eigen::Vector3d(1.0, 2.0, 3.0)) == doctest::Approx(1.0));
  CHECK(sample_sd(Eigen::VectorXd::Constant(1, 4.0)) == 0.0);
}

}

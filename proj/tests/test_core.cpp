#include "doctest.h"
#include "test_util.hpp"

#include "sparse_si/core.hpp"

#include <cmath>
#include <numbers>

using namespace sparse_si;
using std::numbers::pi;

TEST_SUITE("core") {

TEST_CASE("dictionary values at simple points") {
  Eigen::VectorXd phi = eval_dictionary(0.0, 3);
  CHECK(phi[0] == 1.0);
  CHECK(phi[1] == doctest::Approx(1.0));
  CHECK(phi[2] == doctest::Approx(0.0));

  phi = eval_dictionary(1.0, 3);
  CHECK(phi[1] == doctest::Approx(-1.0));
  CHECK(std::abs(phi[2]) < 1e-15);

  phi = eval_dictionary(0.5, 2);
  CHECK(phi.size() == 2);
  CHECK(std::abs(phi[1]) < 1e-15);
}

TEST_CASE("dictionary follows the cos/sin pairing for higher frequencies") {
  const double t = 0.37;
  const Eigen::VectorXd phi = eval_dictionary(t, 7);
  for (int j = 1; j <= 3; ++j) {
    CHECK(phi[2 * j - 1] == doctest::Approx(std::cos(pi * j * t)).epsilon(1e-14));
    CHECK(phi[2 * j] == doctest::Approx(std::sin(pi * j * t)).epsilon(1e-14));
  }
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const Eigen::MatrixXd design = design_matrix(ts, 4);
  for (Eigen::Index i = 0; i < ts.size(); ++i) CHECK((design.row(i).transpose() - eval_dictionary(ts[i], 4)).norm() < 1e-15);
}

TEST_CASE("link evaluation") {
  CHECK(eval_link(LinkCoeffs{Eigen::VectorXd::Constant(1, 2.5)}, 0.3) == 2.5);
  CHECK(eval_link(LinkCoeffs{Eigen::Vector2d(0.0, 1.0)}, 0.0) == doctest::Approx(1.0));
  const double expected = 1.0 + 2.0 * std::cos(pi / 4) + 3.0 * std::sin(pi / 4);
  CHECK(eval_link(LinkCoeffs{Eigen::Vector3d(1.0, 2.0, 3.0)}, 0.25) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("weighted l1 norm") {
  CHECK(LinkCoeffs{Eigen::Vector3d(1.0, -2.0, 0.5)}.weighted_l1() == doctest::Approx(1.0 + 4.0 + 1.5));
}

TEST_CASE("index vectors are normalized with a positive leading coordinate") {
  const IndexVector a = IndexVector::normalized(Eigen::Vector3d(0.0, -2.0, 2.0));
  CHECK(a[0] == 0.0);
  CHECK(a[1] == doctest::Approx(0.5));
  CHECK(a[2] == doctest::Approx(-0.5));
  CHECK(a.support() == std::vector<int>{1, 2});
  CHECK(a.values().lpNorm<1>() == doctest::Approx(1.0));

  CHECK_THROWS_AS(IndexVector::from_values(Eigen::Vector2d(-0.5, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(IndexVector::from_values(Eigen::Vector2d(0.5, 0.4)), std::invalid_argument);
  CHECK_THROWS_AS(IndexVector::normalized(Eigen::Vector2d::Zero()), std::invalid_argument);
  CHECK(IndexVector::unit(4, 2).support() == std::vector<int>{2});
}

TEST_CASE("predictions") {
  ModelState s;
  s.index = IndexVector::unit(2, 0);
  s.link = LinkCoeffs{Eigen::Vector2d(0.0, 1.0)};
  CHECK(predict(s, Eigen::Vector2d(0.0, 0.7)) == doctest::Approx(1.0));

  s.link = LinkCoeffs{Eigen::VectorXd::Constant(1, -0.4)};
  CHECK(predict(s, Eigen::Vector2d(0.3, -0.9)) == -0.4);

  s.index = IndexVector::from_values(Eigen::Vector2d(0.5, 0.5));
  s.link = LinkCoeffs{Eigen::Vector2d(0.0, 1.0)};
  CHECK(predict(s, Eigen::Vector2d(1.0, 1.0)) == doctest::Approx(-1.0));
}

TEST_CASE("empirical risk") {
  Dataset d{Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(2)};
  const LinkCoeffs zero{Eigen::VectorXd::Zero(1)};
  CHECK(empirical_risk(d, IndexVector::unit(1, 0), zero) == 0.0);
  d.y = Eigen::Vector2d(1.0, -1.0);
  CHECK(empirical_risk(d, IndexVector::unit(1, 0), zero) == doctest::Approx(1.0));
}

TEST_CASE("empirical risk matches a two-loop summation") {
  const Dataset d = testing::random_dataset(17, 4, 11);
  const IndexVector index = IndexVector::normalized(Eigen::Vector4d(0.3, -0.2, 0.0, 0.5));
  const LinkCoeffs link{Eigen::Vector4d(0.2, -0.7, 0.4, 0.1)};
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    double t = 0.0;
    for (Eigen::Index j = 0; j < d.p(); ++j) t += index[j] * d.x(i, j);
    const double f = 0.2 - 0.7 * std::cos(pi * t) + 0.4 * std::sin(pi * t) + 0.1 * std::cos(2 * pi * t);
    total += (d.y[i] - f) * (d.y[i] - f);
  }
  CHECK(std::abs(empirical_risk(d, index, link) - total / d.n()) < 1e-12);
  CHECK(make_state(d, index, link).risk == doctest::Approx(total / d.n()).epsilon(1e-12));
}

TEST_CASE("theoretical inverse temperature") {
  CHECK(theoretical_lambda(90, 1.0, 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(theoretical_lambda(180, 1.0, 0.0, 1.0) == doctest::Approx(2.0));
  CHECK(theoretical_lambda(90, 1.0, 1.0, 10.0) == doctest::Approx(90.0 / 266.0));
}

TEST_CASE("dataset validation") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  CHECK_NOTHROW(make_dataset(x, Eigen::VectorXd::Zero(3)));
  CHECK_THROWS_AS(make_dataset(x, Eigen::VectorXd::Zero(2)), DataError);
  x(1, 1) = 1.5;
  CHECK_THROWS_AS(make_dataset(x, Eigen::VectorXd::Zero(3)), DataError);
  x(1, 1) = std::nan("");
  CHECK_THROWS_AS(make_dataset(x, Eigen::VectorXd::Zero(3)), DataError);
}

TEST_CASE("config defaults resolve from the problem size") {
  GibbsConfig cfg;
  const GibbsConfig small = cfg.resolved(100, 10);
  CHECK(*small.lambda == 400.0);
  CHECK(*small.steps == 1000);
  CHECK(*small.warm_start == WarmStart::None);
  const GibbsConfig large = cfg.resolved(50, 50);
  CHECK(*large.lambda == 200.0);
  CHECK(*large.steps == 5000);
  CHECK(*large.warm_start == WarmStart::Hhi);

  cfg.lambda = 3.0;
  CHECK(*cfg.resolved(100, 10).lambda == 3.0);

  cfg.C = 0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.C = 1.0;
  cfg.delta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("warm start names round-trip") {
  for (WarmStart w : {WarmStart::None, WarmStart::Hhi, WarmStart::LassoDirection})
    CHECK(warm_start_from_string(to_string(w)) == w);
  CHECK_THROWS(warm_start_from_string("bogus"));
}

}

#pragma once

#include "sparse_si/core.hpp"

#include <vector>

namespace sparse_si {

// Lasso for (1/n) sum_i (y_i - theta^T x_i)^2 + xi * ||theta||_1, no intercept.
struct LassoModel {
  Eigen::VectorXd coeffs;
  double xi = 0.0;
  int sweeps = 0;
  // Objective after each coordinate-descent sweep (non-increasing).
  std::vector<double> objective_trace;
};

struct LassoOptions {
  double tol = 1e-12;  // stop when max |coefficient change| in a sweep is below
  int max_sweeps = 10000;
};

double lasso_objective(const Dataset& data, const Eigen::VectorXd& coeffs, double xi);
LassoModel lasso_fit(const Dataset& data, double xi, const LassoOptions& opts = {});
Eigen::VectorXd lasso_predict(const LassoModel& model, const Eigen::MatrixXd& x);
// xi* / 3 with xi* = sigma sqrt(log(p) / n), floored at 1e-6 so the fit stays
// well defined for noiseless data or p = 1.
double default_lasso_xi(double sigma, Eigen::Index n, Eigen::Index p);
// l1-normalized Lasso coefficients with the sign convention; nullopt when the
// Lasso solution is identically zero.
std::optional<IndexVector> lasso_direction(const Dataset& data, double xi);

// Bandwidth grid {0.75^k : k = 0, ..., floor(ln n)}.
std::vector<double> bandwidth_grid(Eigen::Index n);

struct KernelModel {
  double bandwidth = 1.0;
  std::vector<double> loo_scores;  // one per grid value, grid order
};

// Gaussian-kernel Nadaraya-Watson estimate at x. Falls back to mean(y) when
// every kernel weight underflows.
double nw_predict_at(const Dataset& data, double h, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd nw_predict(const Dataset& data, double h, const Eigen::MatrixXd& x);
// sum_i (y_i - F^{-i}(x_i))^2.
double nw_loo_score(const Dataset& data, double h);
KernelModel nw_select_bandwidth(const Dataset& data);

struct HhiModel {
  IndexVector index = IndexVector::unit(1, 0);
  double bandwidth = 1.0;
  double criterion = 0.0;  // leave-one-out criterion at (bandwidth, index)
};

struct HhiOptions {
  // Regularization for the Lasso initializer; unset uses default_lasso_xi with
  // sigma estimated as sd(y) / 2.
  std::optional<double> lasso_xi;
  int max_sweeps = 50;
};

// Leave-one-out criterion of the 1-d smoother on projections theta^T x.
// +infinity when all projections coincide.
double hhi_loo_criterion(const Dataset& data, const Eigen::VectorXd& theta, double h);
HhiModel hhi_fit(const Dataset& data, const HhiOptions& opts = {});
double hhi_predict_at(const HhiModel& model, const Dataset& train, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd hhi_predict(const HhiModel& model, const Dataset& train, const Eigen::MatrixXd& x);

// Sample standard deviation (n - 1 denominator).
double sample_sd(const Eigen::VectorXd& v);

}  // namespace sparse_si

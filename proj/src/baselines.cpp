#include "sparse_si/baselines.hpp"

#include <cmath>
#include <limits>

namespace sparse_si {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Gaussian-kernel leave-one-out residual sum for a symmetric kernel matrix
// given implicitly by squared scaled distances.
template <typename SqDist>
double loo_residual_sum(const Eigen::VectorXd& y, SqDist&& sqdist) {
  const Eigen::Index n = y.size();
  Eigen::VectorXd num = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::exp(-sqdist(i, j));
      num[i] += w * y[j];
      den[i] += w;
      num[j] += w * y[i];
      den[j] += w;
    }
  }
  const double total = y.sum();
  double score = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fit = den[i] > 0.0 ? num[i] / den[i] : (total - y[i]) / static_cast<double>(n - 1);
    const double r = y[i] - fit;
    score += r * r;
  }
  return score;
}

}  // namespace

double sample_sd(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

double lasso_objective(const Dataset& data, const Eigen::VectorXd& coeffs, double xi) {
  const Eigen::VectorXd r = data.y - data.x * coeffs;
  return r.squaredNorm() / static_cast<double>(data.n()) + xi * coeffs.lpNorm<1>();
}

LassoModel lasso_fit(const Dataset& data, double xi, const LassoOptions& opts) {
  if (!(xi > 0.0)) throw std::invalid_argument("lasso_fit: xi must be positive");
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const double scale = 2.0 / static_cast<double>(n);

  LassoModel model;
  model.xi = xi;
  model.coeffs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = data.y;
  const Eigen::VectorXd col_sq = data.x.colwise().squaredNorm().transpose();

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = model.coeffs[j];
      const double denom = scale * col_sq[j];
      double updated = 0.0;
      if (denom > 0.0) {
        const double rho = scale * (data.x.col(j).dot(resid) + col_sq[j] * old);
        updated = soft_threshold(rho, xi) / denom;
      }
      if (updated != old) {
        resid -= data.x.col(j) * (updated - old);
        model.coeffs[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    model.sweeps = sweep + 1;
    model.objective_trace.push_back(lasso_objective(data, model.coeffs, xi));
    if (max_change < opts.tol) break;
  }
  return model;
}

Eigen::VectorXd lasso_predict(const LassoModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.coeffs.size()) throw std::invalid_argument("lasso_predict: dimension mismatch");
  return x * model.coeffs;
}

double default_lasso_xi(double sigma, Eigen::Index n, Eigen::Index p) {
  const double xi_star = sigma * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
  return std::max(xi_star / 3.0, 1e-6);
}

std::optional<IndexVector> lasso_direction(const Dataset& data, double xi) {
  const LassoModel model = lasso_fit(data, xi);
  if (model.coeffs.lpNorm<1>() == 0.0) return std::nullopt;
  return IndexVector::normalized(model.coeffs);
}

std::vector<double> bandwidth_grid(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("bandwidth_grid: n must be positive");
  const auto kmax = static_cast<int>(std::floor(std::log(static_cast<double>(n))));
  std::vector<double> grid;
  for (int k = 0; k <= kmax; ++k) grid.push_back(std::pow(0.75, k));
  return grid;
}

double nw_predict_at(const Dataset& data, double h, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!(h > 0.0)) throw std::invalid_argument("nw_predict_at: bandwidth must be positive");
  if (x.size() != data.p()) throw std::invalid_argument("nw_predict_at: dimension mismatch");
  double num = 0.0;
  double den = 0.0;
  const double inv_h2 = 1.0 / (h * h);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double w = std::exp(-(data.x.row(i).transpose() - x).squaredNorm() * inv_h2);
    num += w * data.y[i];
    den += w;
  }
  return den > 0.0 ? num / den : data.y.mean();
}

Eigen::VectorXd nw_predict(const Dataset& data, double h, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = nw_predict_at(data, h, x.row(i).transpose());
  return out;
}

double nw_loo_score(const Dataset& data, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("nw_loo_score: bandwidth must be positive");
  const double inv_h2 = 1.0 / (h * h);
  return loo_residual_sum(data.y, [&](Eigen::Index i, Eigen::Index j) {
    return (data.x.row(i) - data.x.row(j)).squaredNorm() * inv_h2;
  });
}

KernelModel nw_select_bandwidth(const Dataset& data) {
  if (data.n() < 3) throw std::invalid_argument("nw_select_bandwidth: need n >= 3");
  KernelModel model;
  double best = std::numeric_limits<double>::infinity();
  // Grid is decreasing, so strict improvement keeps ties at the larger h.
  for (double h : bandwidth_grid(data.n())) {
    const double score = nw_loo_score(data, h);
    model.loo_scores.push_back(score);
    if (score < best) {
      best = score;
      model.bandwidth = h;
    }
  }
  return model;
}

double hhi_loo_criterion(const Dataset& data, const Eigen::VectorXd& theta, double h) {
  const Eigen::VectorXd t = data.x * theta;
  if (t.maxCoeff() - t.minCoeff() == 0.0) return std::numeric_limits<double>::infinity();
  const double inv_h = 1.0 / h;
  return loo_residual_sum(data.y, [&](Eigen::Index i, Eigen::Index j) {
    const double z = (t[i] - t[j]) * inv_h;
    return z * z;
  });
}

HhiModel hhi_fit(const Dataset& data, const HhiOptions& opts) {
  if (data.n() < 5) throw std::invalid_argument("hhi_fit: need n >= 5");
  const Eigen::Index p = data.p();
  const double xi = opts.lasso_xi ? *opts.lasso_xi : default_lasso_xi(sample_sd(data.y) / 2.0, data.n(), p);
  const IndexVector init = lasso_direction(data, xi).value_or(IndexVector::unit(p, 0));

  HhiModel best;
  best.criterion = std::numeric_limits<double>::infinity();
  best.index = init;
  best.bandwidth = 1.0;

  for (double h : bandwidth_grid(data.n())) {
    Eigen::VectorXd theta = init.values();
    double crit = hhi_loo_criterion(data, theta, h);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      bool improved = false;
      for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::VectorXd best_candidate;
        double best_crit = crit;
        for (int g = -10; g <= 10; ++g) {
          Eigen::VectorXd raw = theta;
          raw[j] = g / 10.0;
          if (raw.lpNorm<1>() == 0.0) continue;
          Eigen::VectorXd candidate = IndexVector::normalized(raw).values();
          const double c = hhi_loo_criterion(data, candidate, h);
          if (c < best_crit) {
            best_crit = c;
            best_candidate = std::move(candidate);
          }
        }
        if (best_candidate.size() > 0) {
          theta = std::move(best_candidate);
          crit = best_crit;
          improved = true;
        }
      }
      if (!improved) break;
    }
    if (crit < best.criterion) {
      best.criterion = crit;
      best.bandwidth = h;
      best.index = IndexVector::normalized(theta);
    }
  }
  return best;
}

double hhi_predict_at(const HhiModel& model, const Dataset& train, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != train.p()) throw std::invalid_argument("hhi_predict_at: dimension mismatch");
  const double tx = model.index.values().dot(x);
  const Eigen::VectorXd t = train.x * model.index.values();
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < train.n(); ++i) {
    const double z = (tx - t[i]) / model.bandwidth;
    const double w = std::exp(-z * z);
    num += w * train.y[i];
    den += w;
  }
  return den > 0.0 ? num / den : train.y.mean();
}

Eigen::VectorXd hhi_predict(const HhiModel& model, const Dataset& train, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = hhi_predict_at(model, train, x.row(i).transpose());
  return out;
}

}  // namespace sparse_si

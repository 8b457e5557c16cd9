#include "sparse_si/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sparse_si {

void validate_dataset(const Dataset& data) {
  if (data.x.rows() != data.y.size()) {
    throw DataError("dataset has " + std::to_string(data.x.rows()) + " input rows but " +
                    std::to_string(data.y.size()) + " responses");
  }
  if (data.n() < 2) throw DataError("dataset needs at least 2 observations");
  if (data.p() < 1) throw DataError("dataset needs at least 1 input column");
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!std::isfinite(data.y[i])) {
      throw DataError("non-finite response at row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      const double v = data.x(i, j);
      if (!std::isfinite(v) || std::abs(v) > 1.0) {
        std::ostringstream msg;
        msg << "input (" << i << ", " << j << ") = " << v
            << " lies outside [-1, 1]; normalize the data first";
        throw DataError(msg.str());
      }
    }
  }
}

Dataset make_dataset(Eigen::MatrixXd x, Eigen::VectorXd y) {
  Dataset d{std::move(x), std::move(y)};
  validate_dataset(d);
  return d;
}

IndexVector::IndexVector(Eigen::VectorXd values) : values_(std::move(values)) {
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    if (values_[j] != 0.0) support_.push_back(static_cast<int>(j));
  }
}

IndexVector IndexVector::from_values(Eigen::VectorXd values) {
  if (values.size() == 0) throw std::invalid_argument("index vector must be nonempty");
  const double l1 = values.lpNorm<1>();
  if (!std::isfinite(l1) || std::abs(l1 - 1.0) > 1e-12) {
    throw std::invalid_argument("index vector must have unit l1 norm");
  }
  IndexVector out(std::move(values));
  if (out.support_.empty() || out.values_[out.support_.front()] <= 0.0) {
    throw std::invalid_argument("first nonzero index coordinate must be positive");
  }
  return out;
}

IndexVector IndexVector::normalized(const Eigen::VectorXd& raw) {
  const double l1 = raw.lpNorm<1>();
  if (!(l1 > 0.0) || !std::isfinite(l1)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite index vector");
  }
  Eigen::VectorXd v = raw / l1;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0) {
      if (v[j] < 0.0) v = -v;
      break;
    }
  }
  return IndexVector(std::move(v));
}

IndexVector IndexVector::unit(Eigen::Index p, Eigen::Index j) {
  if (j < 0 || j >= p) throw std::invalid_argument("unit index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
  v[j] = 1.0;
  return IndexVector(std::move(v));
}

Eigen::VectorXd IndexVector::support_values() const {
  Eigen::VectorXd out(support_.size());
  for (std::size_t k = 0; k < support_.size(); ++k) out[k] = values_[support_[k]];
  return out;
}

double LinkCoeffs::weighted_l1() const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) acc += static_cast<double>(j + 1) * std::abs(beta[j]);
  return acc;
}

std::string to_string(WarmStart w) {
  switch (w) {
    case WarmStart::None: return "none";
    case WarmStart::Hhi: return "hhi";
    case WarmStart::LassoDirection: return "lasso";
  }
  return "none";
}

WarmStart warm_start_from_string(const std::string& s) {
  if (s == "none") return WarmStart::None;
  if (s == "hhi") return WarmStart::Hhi;
  if (s == "lasso" || s == "lasso_direction") return WarmStart::LassoDirection;
  throw std::invalid_argument("unknown warm start '" + s + "' (expected none, hhi or lasso)");
}

void GibbsConfig::validate() const {
  if (lambda && !(*lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(C >= 1.0)) throw std::invalid_argument("C must be at least 1");
  if (steps && *steps < 0) throw std::invalid_argument("steps must be nonnegative");
  if (chains < 1) throw std::invalid_argument("chains must be at least 1");
}

GibbsConfig GibbsConfig::resolved(Eigen::Index n, Eigen::Index p) const {
  GibbsConfig out = *this;
  if (!out.lambda) out.lambda = 4.0 * static_cast<double>(n);
  if (!out.steps) out.steps = p <= 10 ? 1000 : 5000;
  if (!out.warm_start) out.warm_start = p <= 10 ? WarmStart::None : WarmStart::Hhi;
  out.validate();
  return out;
}

Eigen::VectorXd eval_dictionary(double t, int m) {
  if (m < 1) throw std::invalid_argument("dictionary size must be positive");
  Eigen::VectorXd out(m);
  out[0] = 1.0;
  for (int idx = 1; idx < m; ++idx) {
    const int freq = (idx + 1) / 2;
    const double arg = std::numbers::pi * freq * t;
    out[idx] = (idx % 2 == 1) ? std::cos(arg) : std::sin(arg);
  }
  return out;
}

Eigen::MatrixXd design_matrix(const Eigen::VectorXd& t, int m) {
  if (m < 1) throw std::invalid_argument("dictionary size must be positive");
  Eigen::MatrixXd out(t.size(), m);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    out(i, 0) = 1.0;
    for (int idx = 1; idx < m; ++idx) {
      const int freq = (idx + 1) / 2;
      const double arg = std::numbers::pi * freq * t[i];
      out(i, idx) = (idx % 2 == 1) ? std::cos(arg) : std::sin(arg);
    }
  }
  return out;
}

double eval_link(const LinkCoeffs& link, double t) {
  if (link.m() == 0) throw std::invalid_argument("link has no coefficients");
  return eval_dictionary(t, link.m()).dot(link.beta);
}

Eigen::VectorXd eval_link(const LinkCoeffs& link, const Eigen::VectorXd& t) {
  if (link.m() == 0) throw std::invalid_argument("link has no coefficients");
  return design_matrix(t, link.m()) * link.beta;
}

double predict(const ModelState& state, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != state.index.dim()) {
    throw std::invalid_argument("predict: input has " + std::to_string(x.size()) +
                                " coordinates, index has " + std::to_string(state.index.dim()));
  }
  return eval_link(state.link, state.index.values().dot(x));
}

Eigen::VectorXd predict(const IndexVector& index, const LinkCoeffs& link, const Eigen::MatrixXd& x) {
  if (x.cols() != index.dim()) {
    throw std::invalid_argument("predict: input has " + std::to_string(x.cols()) +
                                " columns, index has " + std::to_string(index.dim()));
  }
  return eval_link(link, Eigen::VectorXd(x * index.values()));
}

double empirical_risk(const Dataset& data, const IndexVector& index, const LinkCoeffs& link) {
  if (data.n() == 0) throw std::invalid_argument("empirical risk of an empty dataset");
  const Eigen::VectorXd resid = data.y - predict(index, link, data.x);
  return resid.squaredNorm() / static_cast<double>(data.n());
}

ModelState make_state(const Dataset& data, IndexVector index, LinkCoeffs link) {
  const double risk = empirical_risk(data, index, link);
  return ModelState{std::move(index), std::move(link), risk};
}

double theoretical_lambda(long n, double C, double sigma, double L) {
  if (n <= 0) throw std::invalid_argument("theoretical_lambda: n must be positive");
  if (!(C >= 1.0) || !(sigma >= 0.0) || !(L > 0.0)) {
    throw std::invalid_argument("theoretical_lambda: need C >= 1, sigma >= 0, L > 0");
  }
  const double a = 2.0 * C + 1.0;
  const double w = 8.0 * a * std::max(L, a);
  return static_cast<double>(n) / (w + 2.0 * (a * a + 4.0 * sigma * sigma));
}

}  // namespace sparse_si

#pragma once

#include "sparse_si/core.hpp"

#include <Eigen/Dense>

#include <random>

namespace sparse_si::testing {

// Uniform inputs on [-1, 1] and a smooth single-index response.
inline Dataset random_dataset(Eigen::Index n, Eigen::Index p, std::uint64_t seed, double noise = 0.1) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, noise);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = unif(rng);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = 0.5 * x(i, 0) + 0.5 * x(i, std::min<Eigen::Index>(1, p - 1));
    y[i] = 2.0 * t * t + 1.0 + gauss(rng);
  }
  return Dataset{x, y};
}

// Dense Gaussian elimination with partial pivoting, written out by hand.
inline Eigen::VectorXd gauss_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    a.row(c).swap(a.row(piv));
    std::swap(b[c], b[piv]);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      b[r] -= f * b[c];
    }
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (Eigen::Index k = r + 1; k < n; ++k) acc -= a(r, k) * out[k];
    out[r] = acc / a(r, r);
  }
  return out;
}

}  // namespace sparse_si::testing

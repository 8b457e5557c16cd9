#pragma once

#include "sparse_si/core.hpp"

#include <vector>

namespace sparse_si {

// The prior is a product of a support-stratified measure on the index sphere
// and a dimension-stratified measure on link coefficients. Support size i gets
// weight 10^-i (split evenly over the C(p, i) supports), link dimension M gets
// weight 10^-M, and within a stratum the measure is uniform: on the face
// {theta : supp(theta) = I} of the l1 sphere, and on the weighted l1 ball
// B_M(C+1) = {beta : sum_j j|beta_j| <= C+1}. All densities below are logs.
//
// Reference measures: (k-1)-dimensional Hausdorff measure on a face with k
// active coordinates, Lebesgue measure on R^M for coefficients.

struct PriorLogDensity {
  double index_part = 0.0;
  double link_part = 0.0;
  double total() const { return index_part + link_part; }
};

// log Vol{beta in R^m : sum_j j|beta_j| <= radius} = m log(2 radius) - 2 log m!.
double log_ball_volume(int m, double radius);

// log Hausdorff measure of one face with k active coordinates:
// 2^(k-1) facets of the l1 sphere, each a simplex of (k-1)-volume sqrt(k)/(k-1)!.
double log_face_measure(int k);

double log_binomial(int n, int k);

double log_prior_index(const IndexVector& index);
// -infinity if the link lies outside B_m(C+1). Throws if m is not in [1, n].
double log_prior_link(const LinkCoeffs& link, long n, double C);
PriorLogDensity log_prior(const ModelState& state, long n, double C);

// Uniform draw on the face with the given (sorted, nonempty) support.
IndexVector sample_index_face(const std::vector<int>& support, Eigen::Index p, Rng& rng);
// Uniform draw on B_m(radius).
LinkCoeffs sample_uniform_ball(int m, double radius, Rng& rng);
// Draw (index, link) from the prior. The returned risk field is 0; use
// make_state to attach a dataset.
ModelState sample_prior(Eigen::Index p, long n, double C, Rng& rng);

}  // namespace sparse_si

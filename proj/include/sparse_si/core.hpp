#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparse_si {

using Rng = std::mt19937_64;

// Raised for invalid input data (bad dimensions, out-of-range values, parse
// failures). The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// n observations of (x, y) with every |x_ij| <= 1.
struct Dataset {
  Eigen::MatrixXd x;  // n x p
  Eigen::VectorXd y;  // n

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

// Throws DataError unless n >= 2, p >= 1, |x| <= 1 and y is finite.
void validate_dataset(const Dataset& data);
Dataset make_dataset(Eigen::MatrixXd x, Eigen::VectorXd y);

// A point of the l1 unit sphere whose first nonzero coordinate is positive.
class IndexVector {
 public:
  // Takes values that already satisfy the invariants (l1 norm 1 within 1e-12,
  // positive first nonzero entry); throws std::invalid_argument otherwise.
  static IndexVector from_values(Eigen::VectorXd values);
  // Divides by the l1 norm and flips the sign if needed.
  static IndexVector normalized(const Eigen::VectorXd& raw);
  static IndexVector unit(Eigen::Index p, Eigen::Index j);

  const Eigen::VectorXd& values() const { return values_; }
  const std::vector<int>& support() const { return support_; }
  Eigen::Index dim() const { return values_.size(); }
  int support_size() const { return static_cast<int>(support_.size()); }
  // Nonzero entries in support order.
  Eigen::VectorXd support_values() const;
  double operator[](Eigen::Index j) const { return values_[j]; }

  friend bool operator==(const IndexVector& a, const IndexVector& b) {
    return a.values_ == b.values_;
  }

 private:
  explicit IndexVector(Eigen::VectorXd values);
  Eigen::VectorXd values_;
  std::vector<int> support_;
};

// Fourier coefficients of the link f = sum_j beta_j phi_j.
struct LinkCoeffs {
  Eigen::VectorXd beta;

  int m() const { return static_cast<int>(beta.size()); }
  // sum_j j |beta_j| with 1-based j.
  double weighted_l1() const;
};

struct ModelState {
  IndexVector index = IndexVector::unit(1, 0);
  LinkCoeffs link;
  double risk = 0.0;  // empirical risk on the dataset the state was built for
};

enum class WarmStart { None, Hhi, LassoDirection };

std::string to_string(WarmStart w);
WarmStart warm_start_from_string(const std::string& s);

// Default link sup-norm bound. See README ("Choosing C").
inline constexpr double kDefaultLinkBound = 10.0;

struct GibbsConfig {
  std::optional<double> lambda;  // unset: 4n
  double C = kDefaultLinkBound;
  double s = 0.1;
  double delta = 0.5;
  std::optional<int> steps;  // unset: 1000 if p <= 10, else 5000
  int chains = 3;
  std::uint64_t seed = 0;
  std::optional<WarmStart> warm_start;  // unset: none if p <= 10, else hhi
  // Average predictions over the last 20% of states of the selected chain
  // instead of returning only the terminal state.
  bool average_tail = false;
  // Cap on concurrently running chains; 0 reads SPARSE_SI_THREADS.
  int threads = 0;

  // Fill unset fields from (n, p) and check invariants.
  GibbsConfig resolved(Eigen::Index n, Eigen::Index p) const;
  void validate() const;
};

// phi_1 = 1, phi_2j = cos(pi j t), phi_2j+1 = sin(pi j t).
Eigen::VectorXd eval_dictionary(double t, int m);
// Row i holds eval_dictionary(t_i, m).
Eigen::MatrixXd design_matrix(const Eigen::VectorXd& t, int m);

double eval_link(const LinkCoeffs& link, double t);
Eigen::VectorXd eval_link(const LinkCoeffs& link, const Eigen::VectorXd& t);

double predict(const ModelState& state, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd predict(const IndexVector& index, const LinkCoeffs& link,
                        const Eigen::MatrixXd& x);

double empirical_risk(const Dataset& data, const IndexVector& index, const LinkCoeffs& link);
ModelState make_state(const Dataset& data, IndexVector index, LinkCoeffs link);

// Inverse temperature of the oracle inequality:
// n / (w + 2[(2C+1)^2 + 4 sigma^2]) with w = 8(2C+1) max(L, 2C+1).
double theoretical_lambda(long n, double C, double sigma, double L);

}  // namespace sparse_si

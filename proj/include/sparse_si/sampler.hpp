#pragma once

#include "sparse_si/core.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparse_si {

// Reversible-jump Metropolis-Hastings targeting the Gibbs posterior
// d rho / d pi proportional to exp(-lambda R_n).
//
// K1 moves change the index (and redraw the link for the new index), K2 moves
// keep the index and redraw the link. Each family mixes a "minus", "equal"
// and "plus" move with weights 1 : 2 : 1 over the moves that are available
// at the current support size (resp. link dimension).
//
// Acceptance ratios are evaluated against explicit reference measures:
// Hausdorff measure on each face of the index sphere and Lebesgue measure on
// link coefficients, so that prior densities, proposal densities and the
// dimension-matching Jacobian of the birth/death moves are all expressed in
// the same units.

enum class KernelFamily { K1, K2 };
enum class Move { Minus, Eq, Plus };

struct KernelChoice {
  KernelFamily family = KernelFamily::K1;
  Move move = Move::Eq;

  friend bool operator==(const KernelChoice&, const KernelChoice&) = default;
};

std::string to_string(KernelChoice c);
KernelChoice reverse(KernelChoice c);

// The truncated link proposal could not produce a draw inside the ball.
class ProposalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Proposal {
  ModelState candidate;
  // log q(current | candidate) - log q(candidate | current)
  //   + log pi(candidate) - log pi(current)
  double log_correction = 0.0;
  KernelChoice choice;
};

struct ChainTrace {
  std::vector<double> risks;
  std::vector<int> support_sizes;
  std::vector<int> m_values;
  std::vector<bool> accept_flags;
  std::vector<KernelChoice> moves;
  // Steps whose link proposal hit the rejection cap; they count as rejected.
  int proposal_failures = 0;
  ModelState final_state;
  // Populated only when the chain is run with keep_tail.
  std::vector<ModelState> tail_states;

  double acceptance_rate() const;
};

// Least-squares Fourier coefficients of y on the projections index^T x_i, with
// a ridge jitter of 1e-8 times the mean Gram diagonal.
Eigen::VectorXd least_squares_coeffs(const Dataset& data, const IndexVector& index, int m);

// log P(sum_j j|beta_j| <= C+1) for beta ~ N(center, s^2 I). Zero when a
// Chernoff bound puts the mass outside the ball below e^-40; exact
// for m = 1; otherwise a Monte-Carlo estimate over a fixed table of 10^4
// normal draws, so repeated evaluations agree.
double log_truncation_mass(const Eigen::VectorXd& center, double s, double C);

struct LinkDraw {
  LinkCoeffs link;
  double log_density = 0.0;  // w.r.t. Lebesgue measure on R^m
};

// Truncated Gaussian link proposal centred at the least-squares coefficients.
// Throws ProposalFailure after 1000 draws outside the ball.
LinkDraw dens_s_sample(const Dataset& data, const IndexVector& index, int m, double s, double C, Rng& rng);
double dens_s_log_density(const Dataset& data, const IndexVector& index, const LinkCoeffs& link, double s,
                          double C);

// Probability of removing each support coordinate (support order):
// proportional to exp(-|theta_j|) over coordinates with |theta_j| < delta,
// uniform if none qualifies.
Eigen::VectorXd removal_weights(const IndexVector& index, double delta);
// Probability of adding each coordinate outside the support (ascending order):
// proportional to exp(|sum_i r_i x_ij|) for the current residuals r.
Eigen::VectorXd addition_weights(const Dataset& data, const ModelState& state);

// Mixture probability of `move` when the current level (support size or link
// dimension) is `level` and the largest admissible level is `max_level`.
double move_probability(Move move, int level, int max_level);

// log of sum_{sign} int_{c > 0} c^{k-1} 1[c * sign * to - from in [-delta, delta]^k] dc,
// the density (up to a constant that cancels between the two directions) of
// the same-support index move from `from` to `to`. Both arguments are the
// support coordinates of index vectors with a common support.
double eq_index_log_density(const Eigen::VectorXd& from, const Eigen::VectorXd& to, double delta);

// Log-correction of moving from `from` to `to` with the given kernel. Depends
// on the pair only, so log_correction(a, b, c) = -log_correction(b, a, reverse(c)).
double log_correction(const Dataset& data, const ModelState& from, const ModelState& to, KernelChoice choice,
                      const GibbsConfig& cfg);

// Draws a candidate. Throws std::logic_error if `choice` is not available at
// the current state.
Proposal propose(const Dataset& data, const ModelState& state, KernelChoice choice, const GibbsConfig& cfg,
                 Rng& rng);

struct StepResult {
  ModelState state;
  bool accepted = false;
};

// Accepts with probability min(1, exp(-lambda (R_n(cand) - R_n(cur)) + log_correction)).
StepResult accept_step(const ModelState& state, const Proposal& proposal, double lambda, Rng& rng);

// Draws a move from the boundary-aware mixture of the given family.
KernelChoice draw_move(KernelFamily family, const ModelState& state, Eigen::Index p, Eigen::Index n, Rng& rng);

struct ChainOptions {
  // Keep the last `tail_fraction` of states in ChainTrace::tail_states.
  bool keep_tail = false;
  double tail_fraction = 0.2;
};

// K1 on odd steps, K2 on even steps (steps counted from 1). cfg must be resolved.
ChainTrace run_chain(const Dataset& data, const GibbsConfig& cfg, const ModelState& init, Rng& rng,
                     const ChainOptions& opts = {});

// Compares the mean risk of the last `window` steps with the `window` before.
bool stabilization_diag(const ChainTrace& trace, int window, double tol);
bool stabilization_diag(const ChainTrace& trace);  // window = ceil(steps/10), tol = 1e-3

struct ChainSummary {
  std::uint64_t seed = 0;
  double final_risk = 0.0;
  double acceptance_rate = 0.0;
  bool stabilized = false;
};

struct FitDiagnostics {
  double lambda = 0.0;
  int steps = 0;
  WarmStart warm_start = WarmStart::None;
  bool warm_start_fallback = false;  // baseline failed, prior draw used
  int selected_chain = 0;
  std::vector<ChainSummary> chains;
};

struct FitResult {
  ModelState state;
  FitDiagnostics diagnostics;
  // States whose predictions are averaged when cfg.average_tail is set.
  std::vector<ModelState> tail_states;
};

std::uint64_t chain_seed(std::uint64_t seed, int chain_id);

// Runs cfg.chains independent chains and keeps the one with the lowest
// terminal risk. `warm_index`, when given, replaces the baseline warm start.
FitResult fit(const Dataset& data, const GibbsConfig& cfg, const std::optional<IndexVector>& warm_index = {});

// Terminal-state prediction, or the tail average when the fit kept tail states.
Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& x);

}  // namespace sparse_si

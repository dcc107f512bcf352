#pragma once

#include <vector>

#include "baycausal/distributions.hpp"
#include "baycausal/graph_model.hpp"

namespace baycausal {

enum class BProposal {
  random_walk,  // Gaussian random walk with burn-in step adaptation
  conditional,  // draw from the Gaussian part, MH-correct |det(I - B)|^n
};

enum class Sigma2Conditional {
  approximate,  // ignores the loading prior's dependence on sigma2
  exact,  // includes it
};

// Support-structure move probabilities.
struct MoveConfig {
  double p_shift = 0.4;
  double p_switch = 0.4;
  double p_add = 0.5;
  double p_split_merge = 1.0;

  void validate() const;
};

struct SamplerOptions {
  BProposal b_proposal = BProposal::random_walk;
  double b_step = 0.1;
  double b_target_low = 0.2, b_target_high = 0.5;
  int adapt_interval = 50;
  Sigma2Conditional sigma2_conditional = Sigma2Conditional::approximate;
  double residual_floor = 1e-8;
  double a_step = 0.2;  // log-scale random walk for (a1, a2)
  bool parallel_kernels = true;
};

// All latent quantities of one chain. Loading columns are addressed by a
// fixed slot index 0..P_max-1; a slot is active iff pivots[p] >= 0.
struct SamplerState {
  CausalParameters params;  // L is Q x P_max

  Matrix gamma_alpha, nu_alpha;  // Q x S, gamma in {nu0, 1}
  double rho_alpha = 0.5;
  Matrix gamma_beta, nu_beta;  // Q x Q, diagonal unused
  double rho_beta = 0.5;

  Eigen::MatrixXi delta;   // Q x P_max, 0/1
  std::vector<int> pivots; // P_max, -1 for inactive slots
  Vector zeta;             // P_max
  double kappa = 1.0;
  double a1 = 1.0, a2 = 1.0;

  Matrix C;    // n x P_max, zero in inactive slots
  Matrix tau;  // n x Q

  // Cached residuals Y - mu - A X - B Y - L C (n x Q).
  Matrix resid;

  int Q() const { return params.Q(); }
  int S() const { return params.S(); }
  int P_max() const { return static_cast<int>(pivots.size()); }
  int n() const { return static_cast<int>(tau.rows()); }

  int p_star() const;
  int p_single() const;
  std::vector<int> active_columns() const;
  bool is_active(int p) const { return pivots[static_cast<std::size_t>(p)] >= 0; }
  // Rows not used as a pivot by any active column.
  std::vector<int> unused_rows() const;
  int column_count(int p) const;  // sum_q delta(q, p)
};

void recompute_residuals(SamplerState& state, const Dataset& data,
                         bool parallel = true);

// B = 0, A = 0, mu = column means, sigma2 = Var(Y_q) / 8, no confounders,
// tau = 1, remaining scalars at prior means (or 1 where the mean is
// undefined).
SamplerState initialize_state(const Dataset& data, const Hyperparameters& hyper,
                              Rng& rng);

void validate_dataset(const Dataset& data);

// Log of the full joint density of (data, state) up to an additive constant
// that depends only on the hyperparameters. Uses the cached residuals.
double log_joint_density(const SamplerState& state, const Dataset& data,
                         const Hyperparameters& hyper);

// Log prior mass on the number of active loading columns (labelled slots):
// sum_{k < P*} log(a_P (P - k) / (a2 - 1 + P - k)), a_P = a1 a2 / P.
double log_column_count_prior(int p_star, int P_max, double a1, double a2);

// Sum over rows strictly below the pivot of log Bernoulli(delta | zeta_p).
double log_delta_column_prior(const SamplerState& state, int p);

// Throws std::logic_error describing the first broken invariant.
void check_state_invariants(const SamplerState& state, const Dataset& data,
                            const Hyperparameters& hyper);

}  // namespace baycausal

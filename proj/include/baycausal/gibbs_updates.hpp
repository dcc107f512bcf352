#pragma once

#include "baycausal/state.hpp"

// Fixed-dimension full-conditional updates. Every function keeps
// `state.resid` consistent with the parameters it changes, and expects
// hyperparameters that have been through Hyperparameters::resolve.
namespace baycausal {

void update_mu(SamplerState& state, const Dataset& data,
               const Hyperparameters& hyper, Rng& rng);

// Row-wise Gaussian draw of A followed by gamma/nu/rho for A. No-op if S = 0.
void update_A_block(SamplerState& state, const Dataset& data,
                    const Hyperparameters& hyper, Rng& rng);

// Per-entry proposal scales and acceptance counters for the B updates.
struct BTuning {
  Matrix step;
  Eigen::MatrixXi proposed, accepted;
  long total_proposed = 0, total_accepted = 0;

  static BTuning make(int Q, double step);
  // Scale each step toward the target acceptance band, then reset counters.
  void adapt(double low, double high);
};

// One Metropolis-Hastings update of B(q, k), k != q. Proposals that make B
// unstable are rejected without evaluating the density. Returns acceptance.
bool update_B_entry(SamplerState& state, const Dataset& data,
                    const Hyperparameters& hyper, const SamplerOptions& options,
                    int q, int k, double step, Rng& rng);

// Log of the unnormalized full conditional of B(q, k) at `value`, relative
// to its current value (0 at the current value). -inf outside the stable set.
double log_B_entry_conditional_ratio(const SamplerState& state,
                                     const Dataset& data,
                                     const Hyperparameters& hyper, int q, int k,
                                     double value);

// gamma/nu/rho for the off-diagonal entries of B.
void update_B_spike_slab(SamplerState& state, const Hyperparameters& hyper,
                         Rng& rng);

// Random-scan sweep over all off-diagonal entries, then update_B_spike_slab.
void update_B_block(SamplerState& state, const Dataset& data,
                    const Hyperparameters& hyper, const SamplerOptions& options,
                    BTuning& tuning, Rng& rng);

void update_L_rows(SamplerState& state, const Dataset& data,
                   const Hyperparameters& hyper, Rng& rng);

// Collapsed log-odds of delta(q, p) = 1 vs 0 with L(q, p) integrated out.
double delta_log_odds(const SamplerState& state, int q, int p);

void update_delta(SamplerState& state, const Dataset& data,
                  const Hyperparameters& hyper, Rng& rng);

void update_kappa(SamplerState& state, const Hyperparameters& hyper, Rng& rng);

void update_zeta(SamplerState& state, Rng& rng);

struct ZetaPosterior {
  double alpha, beta;
};
ZetaPosterior zeta_posterior(const SamplerState& state, int p);

// Log target of the (a1, a2) update, without the log-scale Jacobian.
double log_a1_a2_target(const SamplerState& state, const Hyperparameters& hyper,
                        double a1, double a2);

// Coordinate-wise log-scale random-walk MH; returns the number accepted (0-2).
int update_a1_a2(SamplerState& state, const Hyperparameters& hyper,
                 const SamplerOptions& options, Rng& rng);

void update_C(SamplerState& state, const SamplerOptions& options, Rng& rng);

void update_tau(SamplerState& state, const SamplerOptions& options, Rng& rng);

struct InverseGammaParams {
  double shape, scale;
};
InverseGammaParams sigma2_posterior(const SamplerState& state,
                                    const Hyperparameters& hyper,
                                    Sigma2Conditional variant, int q);

void update_sigma2(SamplerState& state, const Hyperparameters& hyper,
                   const SamplerOptions& options, Rng& rng);

}  // namespace baycausal

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "baycausal/gibbs_updates.hpp"
#include "baycausal/structure_moves.hpp"

namespace baycausal {

struct ChainConfig {
  int iterations = 50000;
  int burn_in = 30000;
  int thin = 10;
  int chains = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

// One retained state, reduced to what the summaries and archives need.
struct Sample {
  int iteration = 0;
  Matrix B, A, L;
  Vector mu, sigma2;
  Eigen::MatrixXi gamma_beta, gamma_alpha;  // 1 where the slab is selected
  Eigen::MatrixXi delta;
  std::vector<int> pivots;
  int p_star = 0;
  double kappa = 0.0;
  double log_joint = 0.0;
};

Sample snapshot(const SamplerState& state, double log_joint, int iteration);

struct AcceptanceStats {
  long b_proposed = 0, b_accepted = 0;
  long a_proposed = 0, a_accepted = 0;  // (a1, a2) coordinates
  PivotMoveStats pivots;
  long split_proposed = 0, split_accepted = 0;
  long merge_proposed = 0, merge_accepted = 0;

  std::map<std::string, double> rates() const;
};

struct ChainResult {
  std::vector<Sample> samples;
  // Recorded every `thin` iterations, burn-in included.
  std::vector<int> trace_iteration;
  std::vector<double> trace_log_joint;
  std::vector<int> trace_p_star;
  AcceptanceStats acceptance;
  Matrix b_step;  // final per-entry random-walk scales
};

// Raised when a conditional fails numerically; carries a short state dump.
class ChainFailure : public NumericalError {
 public:
  ChainFailure(const std::string& what, int iteration, std::string dump)
      : NumericalError(what), iteration_(iteration), dump_(std::move(dump)) {}
  int iteration() const { return iteration_; }
  const std::string& dump() const { return dump_; }

 private:
  int iteration_;
  std::string dump_;
};

// One full sweep in the fixed update order. Step-size adaptation is left to
// the caller.
void sweep(SamplerState& state, const Dataset& data, const Hyperparameters& hyper,
           const MoveConfig& moves, const SamplerOptions& options,
           BTuning& tuning, Rng& rng, AcceptanceStats& stats);

// Runs one chain from initialize_state. `hyper` need not be resolved.
ChainResult run_chain(const Dataset& data, const Hyperparameters& hyper,
                      const ChainConfig& config, const MoveConfig& moves,
                      const SamplerOptions& options, Rng& rng);

// Runs config.chains chains, chain c seeded with derive_seed(config.seed, {c}).
// Chains run in parallel when OpenMP is available.
std::vector<ChainResult> run_chains(const Dataset& data,
                                    const Hyperparameters& hyper,
                                    const ChainConfig& config,
                                    const MoveConfig& moves,
                                    const SamplerOptions& options);

// Column order and signs that map a sample's loading slots onto the
// reference columns: aligned column j is sign[j] * L.col(slot[j]), with
// slot -1 for an empty column.
struct ColumnAlignment {
  std::vector<int> slot;
  std::vector<int> sign;
};

// Reference: among samples whose p_star is the mode, the one with the
// highest log joint; its active columns are ordered by pivot row.
const Sample& reference_sample(const std::vector<const Sample*>& samples);
ColumnAlignment align_columns(const Sample& sample, const Sample& reference);

struct PosteriorSummary {
  Matrix incl_prob_B, incl_prob_A, incl_prob_L;
  Matrix mean_B, mean_A, mean_L;
  Vector mean_mu, mean_sigma2;
  Matrix mean_A_marginal;  // plain posterior mean of A over all samples
  std::vector<double> p_star_histogram;  // index = p_star
  int modal_p_star = 0;
  int n_samples = 0;
};

PosteriorSummary summarize(const std::vector<ChainResult>& chains);
PosteriorSummary summarize(const std::vector<Sample>& samples);

struct GraphEstimate {
  Support b_edges, a_edges, l_edges;
  Matrix B, A, L;  // posterior means over samples including the edge
  int p_star = 0;
};

// Edge iff inclusion probability > threshold.
GraphEstimate extract_graph(const PosteriorSummary& summary,
                            double threshold = 0.5);

// Potential scale reduction sqrt((W + B/n) / W) for m >= 2 equal-length
// chains; 1 for identical chains, NaN for fewer than two chains.
double potential_scale_reduction(const std::vector<std::vector<double>>& chains);

// Effective sample size summed over chains (initial positive sequence).
double effective_sample_size(const std::vector<std::vector<double>>& chains);

struct DiagnosticsReport {
  double rhat_log_joint = 0.0;
  std::vector<double> rhat_sigma2;
  double ess_log_joint = 0.0;
  std::vector<double> ess_sigma2;
  std::map<std::string, double> acceptance;  // pooled over chains
  int chains = 0;
  int samples_per_chain = 0;
};

DiagnosticsReport diagnostics(const std::vector<ChainResult>& chains);

}  // namespace baycausal

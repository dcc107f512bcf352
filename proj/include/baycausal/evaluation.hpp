#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "baycausal/inference.hpp"

namespace baycausal {

// Counts over the Q(Q-1) ordered pairs of distinct variables.
struct EdgeConfusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

struct EdgeScore {
  EdgeConfusion confusion;
  double tpr = 0.0, fdr = 0.0, mcc = 0.0;
  bool exact = false;
};

// TPR is 1 when there is no true edge, FDR is 0 when nothing is called, and
// MCC is 0 when its denominator vanishes.
EdgeScore score_confusion(const EdgeConfusion& c);
EdgeScore score_graph(const Support& estimate, const Support& truth);

// Greedily pairs non-empty estimated columns with non-empty truth columns by
// child-set overlap; true iff every pair has identical child sets and the
// numbers of non-empty columns agree.
bool l_support_matches(const Support& estimate, const Support& truth);

struct ReplicateResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  EdgeScore score;
  int modal_p_star = 0;
  bool l_match = false;
  Matrix A_estimate;  // posterior mean of A
  Support b_edges;
};

struct RecoveryReport {
  std::string scenario;
  int n = 0;
  std::vector<ReplicateResult> replicates;
  int completed = 0;
  int csr = 0;
  double mean_tpr = 0.0, mean_fdr = 0.0, mean_mcc = 0.0;
  EdgeScore pooled;  // from summed confusion counts
  EdgeConfusion per_edge_confusion;
  std::vector<int> modal_p_star_counts;  // index = p_star
  int l_match_count = 0;
  Matrix A_truth, A_bias, A_mse;
};

struct ReplicateConfig {
  std::string scenario = "custom";
  CausalParameters truth;
  int n = 1000;
  int replicates = 1;
  std::uint64_t seed = 1;
  ChainConfig chain;
  MoveConfig moves;
  SamplerOptions options;
  Hyperparameters hyper;
  double threshold = 0.5;
};

// Replicate r draws its data with seed derive_seed(seed, {r, 0}) and its
// chains with derive_seed(seed, {r, 1}). Replicates run in parallel; the
// report does not depend on the thread count. A failed replicate is kept
// with ok = false and excluded from the aggregates.
RecoveryReport run_replicates(const ReplicateConfig& config);

// Aggregates completed replicates; used by run_replicates.
void aggregate(RecoveryReport& report);

// One-row plain-text table with CSR, TPR, FDR and MCC columns.
std::string format_table(const RecoveryReport& report);

struct StableSolution {
  std::vector<int> permutation;  // row i of the permuted W is W.row(perm[i])
  Matrix B;
};

// All row permutations of W with a non-zero diagonal (|w_ii| > tol) whose
// diagonally normalized form gives a stable B = I - W_normalized.
std::vector<StableSolution> admissible_stable_permutations(const Matrix& W,
                                                           double tol = 1e-12);

// Random stable B over Q variables whose cycles are vertex-disjoint simple
// cycles (lengths 2 to max_cycle), joined by acyclic edges between them.
Matrix random_disjoint_cycle_graph(int Q, Rng& rng, int max_cycle = 3,
                                   double edge_prob = 0.3);

}  // namespace baycausal

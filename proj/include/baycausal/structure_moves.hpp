#pragma once

#include <vector>

#include "baycausal/state.hpp"

// Moves that change the support of the loading matrix: pivot moves at a
// fixed number of active columns, and split/merge moves that change it.
namespace baycausal {

struct DimensionBookkeeping {
  int p_star = 0;
  int p_single = 0;
  int P_max = 0;
};

DimensionBookkeeping bookkeeping(const SamplerState& state);

enum class DimensionMove { none, split, merge };

bool split_allowed(const DimensionBookkeeping& bk);
bool merge_allowed(const DimensionBookkeeping& bk);

// Each legal move is picked with probability 1/2, the rest is `none`.
DimensionMove choose_dimension_move(const DimensionBookkeeping& bk, Rng& rng);

// Proposal probabilities of one particular split (zero column) or merge
// (single-entry column). Zero when the move is not legal.
double q_split(const DimensionBookkeeping& bk);
double q_merge(const DimensionBookkeeping& bk);

// ---- pivot moves ----------------------------------------------------------

// Log marginal of row q's likelihood with the loadings of the slots in
// `excluded` removed from the residual, and those in `on` integrated out
// under their N(0, kappa sigma2_q) prior. Zero when `on` is empty.
double collapsed_row_log_marginal(const SamplerState& state, int q,
                                  const std::vector<int>& excluded,
                                  const std::vector<int>& on);

// Log prior of one delta column: rows strictly below `pivot` are
// Bernoulli(zeta). Rows above must be zero and the pivot row one.
double delta_column_log_prior(const Eigen::VectorXi& column, int pivot,
                              double zeta);

// First row strictly below the pivot of slot p with delta = 1, or Q.
int next_nonzero_row(const SamplerState& state, int p);

// Candidate pivot rows of the shift move (M_p) and the add move (A_p).
std::vector<int> shift_candidates(const SamplerState& state, int p);
std::vector<int> add_candidates(const SamplerState& state, int p);

// Log acceptance ratios for a fully specified pivot proposal; the loadings
// of the changed cells are integrated out. They do not modify the state.
double log_shift_ratio(const SamplerState& state, int p, int new_pivot);
double log_switch_ratio(const SamplerState& state, int p, int other);
double log_add_ratio(const SamplerState& state, const MoveConfig& moves, int p,
                     int new_pivot);
double log_delete_ratio(const SamplerState& state, const MoveConfig& moves,
                        int p);

// Each returns whether the proposal was accepted; a move whose candidate
// set is empty is a no-op and returns false. The changed cells' loadings
// are redrawn from their conditional afterwards.
bool pivot_shift(SamplerState& state, int p, Rng& rng);
bool pivot_switch(SamplerState& state, int p, Rng& rng);
bool pivot_add_delete(SamplerState& state, const MoveConfig& moves, int p,
                      Rng& rng);

struct PivotMoveStats {
  long shift_proposed = 0, shift_accepted = 0;
  long switch_proposed = 0, switch_accepted = 0;
  long add_delete_proposed = 0, add_delete_accepted = 0;
};

// One pivot move per active column, chosen by the MoveConfig probabilities.
void update_pivots(SamplerState& state, const MoveConfig& moves, Rng& rng,
                   PivotMoveStats* stats = nullptr);

// ---- split / merge ----------------------------------------------------------

struct SplitProposal {
  int slot = -1;    // inactive column to switch on
  int pivot = -1;   // unused row
  double u = 0.0;   // sign * U with U ~ Uniform(0, 1), sign = +-1 equally likely
  Vector c;         // n new confounder values
  double zeta = 0.5;
};

SplitProposal propose_split(const SamplerState& state, Rng& rng);

struct SplitMap {
  double sigma2;
  double loading;
};
// (sigma2, U) -> ((1 - U^2) sigma2, sqrt(8 sigma2) U)
SplitMap split_map(double sigma2, double u);

struct MergeMap {
  double sigma2;
  double u;
};
// Inverse of split_map: (sigma2, L) -> (sigma2 + L^2 / 8, L / sqrt(L^2 + 8 sigma2)).
MergeMap merge_map(double sigma2, double loading);

double log_split_ratio(const SamplerState& state, const Hyperparameters& hyper,
                       const SplitProposal& proposal);
void apply_split(SamplerState& state, const SplitProposal& proposal);

// The split draws the sign of the new loading because the loading prior and
// the row updates are symmetric in sign; with U on (0, 1) alone, merges from
// negative pivot loadings would have no matching split and the chain would
// put half the correct mass on the larger model. The sign's proposal
// probability 1/2 enters both ratios as log 2.
// Ratio for merging single-entry slot p.
double log_merge_ratio(const SamplerState& state, const Hyperparameters& hyper,
                       int p);
void apply_merge(SamplerState& state, int p);

bool split_move(SamplerState& state, const Hyperparameters& hyper, Rng& rng);
bool merge_move(SamplerState& state, const Hyperparameters& hyper, Rng& rng);

struct DimensionMoveResult {
  DimensionMove move = DimensionMove::none;
  bool accepted = false;
};

// With probability p_split_merge, choose and attempt one dimension move.
DimensionMoveResult update_dimension(SamplerState& state,
                                     const Hyperparameters& hyper,
                                     const MoveConfig& moves, Rng& rng);

}  // namespace baycausal

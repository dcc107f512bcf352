#include "baycausal/structure_moves.hpp"

#include <algorithm>
#include <cmath>

namespace baycausal {

DimensionBookkeeping bookkeeping(const SamplerState& s) {
  return {s.p_star(), s.p_single(), s.P_max()};
}

bool split_allowed(const DimensionBookkeeping& bk) { return bk.p_star < bk.P_max; }

bool merge_allowed(const DimensionBookkeeping& bk) {
  return bk.p_single >= 1 && !(bk.p_star == 1 && bk.p_single == 1);
}

DimensionMove choose_dimension_move(const DimensionBookkeeping& bk, Rng& rng) {
  const bool split = split_allowed(bk), merge = merge_allowed(bk);
  const double u = rng.uniform();
  if (split && merge) return u < 0.5 ? DimensionMove::split : DimensionMove::merge;
  if (split) return u < 0.5 ? DimensionMove::split : DimensionMove::none;
  if (merge) return u < 0.5 ? DimensionMove::merge : DimensionMove::none;
  return DimensionMove::none;
}

double q_split(const DimensionBookkeeping& bk) {
  if (!split_allowed(bk)) return 0.0;
  return 1.0 / (2.0 * (bk.P_max - bk.p_star));
}

double q_merge(const DimensionBookkeeping& bk) {
  if (!merge_allowed(bk)) return 0.0;
  return 1.0 / (2.0 * bk.p_single);
}

namespace {

struct RowStats {
  Matrix S;  // sum tau C_K C_K^T
  Vector s;  // sum tau C_K r
};

RowStats row_stats(const SamplerState& st, int q, const std::vector<int>& excluded,
                   const std::vector<int>& on) {
  const auto m = static_cast<Eigen::Index>(on.size());
  RowStats out{Matrix::Zero(m, m), Vector::Zero(m)};
  for (int i = 0; i < st.n(); ++i) {
    double r = st.resid(i, q);
    for (int p : excluded) r += st.params.L(q, p) * st.C(i, p);
    const double w = st.tau(i, q);
    for (Eigen::Index a = 0; a < m; ++a) {
      const double wc = w * st.C(i, on[static_cast<std::size_t>(a)]);
      out.s(a) += wc * r;
      for (Eigen::Index b = a; b < m; ++b)
        out.S(a, b) += wc * st.C(i, on[static_cast<std::size_t>(b)]);
    }
  }
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < a; ++b) out.S(a, b) = out.S(b, a);
  return out;
}

// Sets the loadings of `excluded` in row q to their conditional draw given
// that only `on` are non-zero, and refreshes the residual column.
void redraw_row_loadings(SamplerState& st, int q, const std::vector<int>& excluded,
                         const std::vector<int>& on, Rng& rng) {
  for (int p : excluded) {
    if (st.params.L(q, p) != 0.0) {
      st.resid.col(q) += st.params.L(q, p) * st.C.col(p);
      st.params.L(q, p) = 0.0;
    }
  }
  if (on.empty()) return;
  const RowStats rs = row_stats(st, q, {}, on);
  const auto m = static_cast<Eigen::Index>(on.size());
  const Matrix prec = rs.S + Matrix::Identity(m, m) / st.kappa;
  Eigen::LLT<Matrix> llt(prec);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("loading precision is not positive definite");
  }
  Vector z(m);
  for (Eigen::Index a = 0; a < m; ++a) z(a) = rng.normal();
  const Vector draw = llt.solve(rs.s) +
                      std::sqrt(st.params.sigma2(q)) * llt.matrixU().solve(z);
  for (Eigen::Index a = 0; a < m; ++a) {
    const int p = on[static_cast<std::size_t>(a)];
    st.params.L(q, p) = draw(a);
    st.resid.col(q) -= draw(a) * st.C.col(p);
  }
}

std::vector<int> on_slots(const SamplerState& st, int q,
                          const std::vector<int>& slots) {
  std::vector<int> out;
  for (int p : slots)
    if (st.delta(q, p)) out.push_back(p);
  return out;
}

int uniform_index(std::size_t size, Rng& rng) {
  return static_cast<int>(std::min<double>(
      std::floor(rng.uniform() * static_cast<double>(size)),
      static_cast<double>(size - 1)));
}

}  // namespace

double collapsed_row_log_marginal(const SamplerState& st, int q,
                                  const std::vector<int>& excluded,
                                  const std::vector<int>& on) {
  if (on.empty()) return 0.0;
  const RowStats rs = row_stats(st, q, excluded, on);
  const auto m = static_cast<Eigen::Index>(on.size());
  const double k = st.kappa;
  const Eigen::LLT<Matrix> outer(Matrix::Identity(m, m) + k * rs.S);
  const Eigen::LLT<Matrix> inner(rs.S + Matrix::Identity(m, m) / k);
  if (outer.info() != Eigen::Success || inner.info() != Eigen::Success) {
    throw NumericalError("collapsed row marginal is not positive definite");
  }
  const double logdet =
      2.0 * outer.matrixLLT().diagonal().array().log().sum();
  const double quad = rs.s.dot(inner.solve(rs.s));
  return -0.5 * logdet + 0.5 * quad / st.params.sigma2(q);
}

double delta_column_log_prior(const Eigen::VectorXi& column, int pivot,
                              double zeta) {
  double acc = 0.0;
  for (Eigen::Index q = pivot + 1; q < column.size(); ++q) {
    acc += column(q) ? std::log(zeta) : std::log1p(-zeta);
  }
  return acc;
}

int next_nonzero_row(const SamplerState& st, int p) {
  const int piv = st.pivots[static_cast<std::size_t>(p)];
  for (int q = piv + 1; q < st.Q(); ++q)
    if (st.delta(q, p)) return q;
  return st.Q();
}

std::vector<int> shift_candidates(const SamplerState& st, int p) {
  const int star = next_nonzero_row(st, p);
  std::vector<int> out;
  for (int q : st.unused_rows())
    if (q < star) out.push_back(q);
  return out;
}

std::vector<int> add_candidates(const SamplerState& st, int p) {
  const int piv = st.pivots[static_cast<std::size_t>(p)];
  std::vector<int> out;
  for (int q : st.unused_rows())
    if (q < piv) out.push_back(q);
  return out;
}

double log_shift_ratio(const SamplerState& st, int p, int new_pivot) {
  const int piv = st.pivots[static_cast<std::size_t>(p)];
  const std::vector<int> slot{p};
  double lr = collapsed_row_log_marginal(st, new_pivot, slot, slot) -
              collapsed_row_log_marginal(st, piv, slot, slot);
  Eigen::VectorXi col = st.delta.col(p);
  const double before = delta_column_log_prior(col, piv, st.zeta(p));
  col(piv) = 0;
  col(new_pivot) = 1;
  lr += delta_column_log_prior(col, new_pivot, st.zeta(p)) - before;
  return lr;
}

namespace {

struct SwitchPlan {
  std::vector<int> rows;  // rows whose indicators differ in the range
  Eigen::VectorXi col_p, col_o;
  int pivot_p, pivot_o;
};

SwitchPlan plan_switch(const SamplerState& st, int p, int other) {
  SwitchPlan plan;
  const int lp = st.pivots[static_cast<std::size_t>(p)];
  const int lo = st.pivots[static_cast<std::size_t>(other)];
  plan.col_p = st.delta.col(p);
  plan.col_o = st.delta.col(other);
  for (int q = std::min(lp, lo); q <= std::max(lp, lo); ++q) {
    if (plan.col_p(q) != plan.col_o(q)) {
      plan.rows.push_back(q);
      std::swap(plan.col_p(q), plan.col_o(q));
    }
  }
  plan.pivot_p = lo;
  plan.pivot_o = lp;
  return plan;
}

}  // namespace

double log_switch_ratio(const SamplerState& st, int p, int other) {
  const SwitchPlan plan = plan_switch(st, p, other);
  const std::vector<int> pair{p, other};
  double lr = 0.0;
  for (int q : plan.rows) {
    const std::vector<int> now = on_slots(st, q, pair);
    const std::vector<int> next{now.front() == p ? other : p};
    lr += collapsed_row_log_marginal(st, q, pair, next) -
          collapsed_row_log_marginal(st, q, pair, now);
  }
  lr += delta_column_log_prior(plan.col_p, plan.pivot_p, st.zeta(p)) +
        delta_column_log_prior(plan.col_o, plan.pivot_o, st.zeta(other)) -
        delta_column_log_prior(st.delta.col(p), st.pivots[static_cast<std::size_t>(p)],
                               st.zeta(p)) -
        delta_column_log_prior(st.delta.col(other),
                               st.pivots[static_cast<std::size_t>(other)],
                               st.zeta(other));
  return lr;
}

double log_add_ratio(const SamplerState& st, const MoveConfig& moves, int p,
                     int new_pivot) {
  const int piv = st.pivots[static_cast<std::size_t>(p)];
  const std::vector<int> slot{p};
  const auto n_add = static_cast<double>(add_candidates(st, p).size());
  Eigen::VectorXi col = st.delta.col(p);
  const double before = delta_column_log_prior(col, piv, st.zeta(p));
  col(new_pivot) = 1;
  return collapsed_row_log_marginal(st, new_pivot, slot, slot) +
         delta_column_log_prior(col, new_pivot, st.zeta(p)) - before +
         std::log1p(-moves.p_add) - std::log(moves.p_add) + std::log(n_add);
}

double log_delete_ratio(const SamplerState& st, const MoveConfig& moves, int p) {
  const int piv = st.pivots[static_cast<std::size_t>(p)];
  const int star = next_nonzero_row(st, p);
  const std::vector<int> slot{p};
  // Add candidates from the reverse state: unused rows above star plus the
  // freed row piv.
  double n_add = 1.0;
  for (int q : st.unused_rows())
    if (q < star) n_add += 1.0;
  Eigen::VectorXi col = st.delta.col(p);
  const double before = delta_column_log_prior(col, piv, st.zeta(p));
  col(piv) = 0;
  return -collapsed_row_log_marginal(st, piv, slot, slot) +
         delta_column_log_prior(col, star, st.zeta(p)) - before +
         std::log(moves.p_add) - std::log(n_add) - std::log1p(-moves.p_add);
}

bool pivot_shift(SamplerState& st, int p, Rng& rng) {
  const std::vector<int> cand = shift_candidates(st, p);
  if (cand.empty()) return false;
  const int piv = st.pivots[static_cast<std::size_t>(p)];
  const int target = cand[static_cast<std::size_t>(uniform_index(cand.size(), rng))];
  const bool accept = std::log(rng.uniform()) < log_shift_ratio(st, p, target);
  if (accept) {
    st.delta(piv, p) = 0;
    st.delta(target, p) = 1;
    st.pivots[static_cast<std::size_t>(p)] = target;
  }
  const std::vector<int> slot{p};
  for (int q : {piv, target}) redraw_row_loadings(st, q, slot, on_slots(st, q, slot), rng);
  return accept;
}

bool pivot_switch(SamplerState& st, int p, Rng& rng) {
  std::vector<int> others;
  for (int o : st.active_columns())
    if (o != p) others.push_back(o);
  if (others.empty()) return false;
  const int other = others[static_cast<std::size_t>(uniform_index(others.size(), rng))];
  const SwitchPlan plan = plan_switch(st, p, other);
  if (plan.rows.empty()) return true;
  const bool accept = std::log(rng.uniform()) < log_switch_ratio(st, p, other);
  if (accept) {
    st.delta.col(p) = plan.col_p;
    st.delta.col(other) = plan.col_o;
    st.pivots[static_cast<std::size_t>(p)] = plan.pivot_p;
    st.pivots[static_cast<std::size_t>(other)] = plan.pivot_o;
  }
  const std::vector<int> pair{p, other};
  for (int q : plan.rows) redraw_row_loadings(st, q, pair, on_slots(st, q, pair), rng);
  return accept;
}

bool pivot_add_delete(SamplerState& st, const MoveConfig& moves, int p, Rng& rng) {
  const int piv = st.pivots[static_cast<std::size_t>(p)];
  const std::vector<int> slot{p};
  if (rng.uniform() < moves.p_add) {
    const std::vector<int> cand = add_candidates(st, p);
    if (cand.empty()) return false;
    const int target = cand[static_cast<std::size_t>(uniform_index(cand.size(), rng))];
    const bool accept =
        std::log(rng.uniform()) < log_add_ratio(st, moves, p, target);
    if (accept) {
      st.delta(target, p) = 1;
      st.pivots[static_cast<std::size_t>(p)] = target;
    }
    redraw_row_loadings(st, target, slot, on_slots(st, target, slot), rng);
    return accept;
  }
  const int star = next_nonzero_row(st, p);
  if (star >= st.Q()) return false;
  const std::vector<int> unused = st.unused_rows();
  if (std::find(unused.begin(), unused.end(), star) == unused.end()) return false;
  const bool accept = std::log(rng.uniform()) < log_delete_ratio(st, moves, p);
  if (accept) {
    st.delta(piv, p) = 0;
    st.pivots[static_cast<std::size_t>(p)] = star;
  }
  redraw_row_loadings(st, piv, slot, on_slots(st, piv, slot), rng);
  return accept;
}

void update_pivots(SamplerState& st, const MoveConfig& moves, Rng& rng,
                   PivotMoveStats* stats) {
  PivotMoveStats local;
  PivotMoveStats& acc = stats ? *stats : local;
  for (int p : st.active_columns()) {
    const double u = rng.uniform();
    if (u < moves.p_shift) {
      ++acc.shift_proposed;
      acc.shift_accepted += pivot_shift(st, p, rng) ? 1 : 0;
    } else if (u < moves.p_shift + moves.p_switch) {
      if (st.p_star() < 2) continue;
      ++acc.switch_proposed;
      acc.switch_accepted += pivot_switch(st, p, rng) ? 1 : 0;
    } else {
      ++acc.add_delete_proposed;
      acc.add_delete_accepted += pivot_add_delete(st, moves, p, rng) ? 1 : 0;
    }
  }
}

SplitMap split_map(double sigma2, double u) {
  return {(1.0 - u * u) * sigma2, std::sqrt(8.0 * sigma2) * u};
}

MergeMap merge_map(double sigma2, double loading) {
  const double merged = sigma2 + loading * loading / 8.0;
  return {merged, loading / std::sqrt(loading * loading + 8.0 * sigma2)};
}

SplitProposal propose_split(const SamplerState& st, Rng& rng) {
  std::vector<int> zero;
  for (int p = 0; p < st.P_max(); ++p)
    if (!st.is_active(p)) zero.push_back(p);
  const std::vector<int> rows = st.unused_rows();
  if (zero.empty() || rows.empty()) {
    throw std::logic_error("split proposed with no free column or pivot row");
  }
  SplitProposal prop;
  prop.slot = zero[static_cast<std::size_t>(uniform_index(zero.size(), rng))];
  prop.pivot = rows[static_cast<std::size_t>(uniform_index(rows.size(), rng))];
  prop.u = rng.uniform();
  if (rng.uniform() < 0.5) prop.u = -prop.u;
  prop.c.resize(st.n());
  for (int i = 0; i < st.n(); ++i) prop.c(i) = rng.normal();
  const double aP = st.a1 * st.a2 / st.P_max();
  prop.zeta = std::clamp(draw_beta(aP, st.a2, rng), 1e-300, 1.0 - 1e-16);
  return prop;
}

double log_split_ratio(const SamplerState& st, const Hyperparameters& h,
                       const SplitProposal& prop) {
  const int l = prop.pivot, P = st.P_max(), P_star = st.p_star();
  const double s_old = st.params.sigma2(l);
  const SplitMap m = split_map(s_old, prop.u);
  const double k = st.kappa;

  double lr = log_normal_pdf(m.loading, 0.0, k * m.sigma2);
  for (int p : st.active_columns()) {
    if (!st.delta(l, p)) continue;
    const double v = st.params.L(l, p);
    lr += log_normal_pdf(v, 0.0, k * m.sigma2) - log_normal_pdf(v, 0.0, k * s_old);
  }
  lr += log_inverse_gamma_pdf(m.sigma2, h.a_sigma, h.b_sigma) -
        log_inverse_gamma_pdf(s_old, h.a_sigma, h.b_sigma);
  // Column-count prior with zeta marginalized; the Beta density of the new
  // zeta, the N(0, 1) prior of the new C column and the uniform pivot-row
  // prior all cancel against the proposal.
  const double aP = st.a1 * st.a2 / P;
  lr += std::log(aP * (P - P_star) / (st.a2 - 1.0 + P - P_star));
  lr += (st.Q() - 1 - l) * std::log1p(-prop.zeta);
  for (int i = 0; i < st.n(); ++i) {
    const double t = st.tau(i, l);
    const double r = st.resid(i, l);
    const double r_new = r - m.loading * prop.c(i);
    lr += log_normal_pdf(r_new, 0.0, m.sigma2 / t) -
          log_normal_pdf(r, 0.0, s_old / t);
  }
  lr += std::log(static_cast<double>(P - P_star) / (st.p_single() + 1));
  lr += std::log(2.0) + 0.5 * std::log(8.0 * s_old);
  return lr;
}

void apply_split(SamplerState& st, const SplitProposal& prop) {
  const int l = prop.pivot, p = prop.slot;
  const SplitMap m = split_map(st.params.sigma2(l), prop.u);
  st.params.sigma2(l) = m.sigma2;
  st.params.L(l, p) = m.loading;
  st.delta(l, p) = 1;
  st.pivots[static_cast<std::size_t>(p)] = l;
  st.zeta(p) = prop.zeta;
  st.C.col(p) = prop.c;
  st.resid.col(l) -= m.loading * prop.c;
}

double log_merge_ratio(const SamplerState& st, const Hyperparameters& h, int p) {
  const int l = st.pivots[static_cast<std::size_t>(p)];
  const int P = st.P_max(), P_star = st.p_star();
  const double s_cur = st.params.sigma2(l);
  const double L = st.params.L(l, p);
  const double s_merged = s_cur + L * L / 8.0;
  const double k = st.kappa;

  double lr = -log_normal_pdf(L, 0.0, k * s_cur);
  for (int o : st.active_columns()) {
    if (o == p || !st.delta(l, o)) continue;
    const double v = st.params.L(l, o);
    lr += log_normal_pdf(v, 0.0, k * s_merged) - log_normal_pdf(v, 0.0, k * s_cur);
  }
  lr += log_inverse_gamma_pdf(s_merged, h.a_sigma, h.b_sigma) -
        log_inverse_gamma_pdf(s_cur, h.a_sigma, h.b_sigma);
  const double aP = st.a1 * st.a2 / P;
  const int freed = P - (P_star - 1);
  lr -= std::log(aP * freed / (st.a2 - 1.0 + freed));
  lr -= (st.Q() - 1 - l) * std::log1p(-st.zeta(p));
  for (int i = 0; i < st.n(); ++i) {
    const double t = st.tau(i, l);
    const double r = st.resid(i, l);
    lr += log_normal_pdf(r + L * st.C(i, p), 0.0, s_merged / t) -
          log_normal_pdf(r, 0.0, s_cur / t);
  }
  lr -= std::log(static_cast<double>(freed) / st.p_single());
  lr -= std::log(2.0) + 0.5 * std::log(8.0 * s_merged);
  return lr;
}

void apply_merge(SamplerState& st, int p) {
  const int l = st.pivots[static_cast<std::size_t>(p)];
  const double L = st.params.L(l, p);
  st.resid.col(l) += L * st.C.col(p);
  st.params.sigma2(l) = merge_map(st.params.sigma2(l), L).sigma2;
  st.params.L.col(p).setZero();
  st.delta.col(p).setZero();
  st.pivots[static_cast<std::size_t>(p)] = -1;
  st.C.col(p).setZero();
}

bool split_move(SamplerState& st, const Hyperparameters& h, Rng& rng) {
  const SplitProposal prop = propose_split(st, rng);
  if (std::log(rng.uniform()) < log_split_ratio(st, h, prop)) {
    apply_split(st, prop);
    return true;
  }
  return false;
}

bool merge_move(SamplerState& st, const Hyperparameters& h, Rng& rng) {
  std::vector<int> single;
  for (int p : st.active_columns())
    if (st.column_count(p) == 1) single.push_back(p);
  if (single.empty()) return false;
  const int p = single[static_cast<std::size_t>(uniform_index(single.size(), rng))];
  if (std::log(rng.uniform()) < log_merge_ratio(st, h, p)) {
    apply_merge(st, p);
    return true;
  }
  return false;
}

DimensionMoveResult update_dimension(SamplerState& st, const Hyperparameters& h,
                                     const MoveConfig& moves, Rng& rng) {
  DimensionMoveResult out;
  if (!(rng.uniform() < moves.p_split_merge)) return out;
  out.move = choose_dimension_move(bookkeeping(st), rng);
  if (out.move == DimensionMove::split) out.accepted = split_move(st, h, rng);
  if (out.move == DimensionMove::merge) out.accepted = merge_move(st, h, rng);
  return out;
}

}  // namespace baycausal

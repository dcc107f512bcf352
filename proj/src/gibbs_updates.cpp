#include "baycausal/gibbs_updates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "baycausal/kernels.hpp"

namespace baycausal {

namespace {

// Draws from N(P^{-1} b, scale * P^{-1}) given the precision P.
Vector draw_gaussian_from_precision(const Matrix& precision, const Vector& b,
                                    double scale, Rng& rng) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("posterior precision is not positive definite");
  }
  Vector mean = llt.solve(b);
  Vector z(b.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
  return mean + std::sqrt(scale) * llt.matrixU().solve(z);
}

struct StabilityEval {
  bool stable;
  double log_abs_det;
};

// Induced 1- and inf-norms bound the spectral radius; the eigenvalue solve
// only runs when both bounds are inconclusive.
StabilityEval evaluate_B(const Matrix& B) {
  const double n1 = B.cwiseAbs().colwise().sum().maxCoeff();
  const double ninf = B.cwiseAbs().rowwise().sum().maxCoeff();
  if (std::min(n1, ninf) >= 1.0 && !(spectral_radius(B) < 1.0)) {
    return {false, 0.0};
  }
  // radius within rounding of 1 can leave I - B exactly singular
  try {
    return {true, log_abs_det_i_minus(B)};
  } catch (const NumericalError&) {
    return {false, 0.0};
  }
}

// Spike/slab indicator, slab variance and inclusion probability for one
// coefficient matrix; `skip_diagonal` for B.
void spike_slab_sweep(const Matrix& coef, Matrix& gamma, Matrix& nu,
                      double& rho, bool skip_diagonal,
                      const Hyperparameters& h, Rng& rng) {
  long slab = 0, spike = 0;
  for (Eigen::Index q = 0; q < coef.rows(); ++q) {
    for (Eigen::Index k = 0; k < coef.cols(); ++k) {
      if (skip_diagonal && q == k) continue;
      const double v = coef(q, k);
      const double lo = spike_slab_log_odds(v, nu(q, k), h.nu0, rho);
      gamma(q, k) = draw_bernoulli_logit(lo, rng) ? 1.0 : h.nu0;
      nu(q, k) = draw_inverse_gamma(h.a_nu + 0.5,
                                    h.b_nu + v * v / (2.0 * gamma(q, k)), rng);
      if (gamma(q, k) == 1.0) ++slab; else ++spike;
    }
  }
  if (slab + spike > 0) {
    rho = draw_beta(h.a_rho + static_cast<double>(slab),
                    h.b_rho + static_cast<double>(spike), rng);
  }
}

}  // namespace

void update_mu(SamplerState& s, const Dataset& data, const Hyperparameters& h,
               Rng& rng) {
  const int n = data.n();
  for (int q = 0; q < s.Q(); ++q) {
    const double old = s.params.mu(q);
    const double s2 = s.params.sigma2(q);
    double prec = 1.0 / h.sigma2_mu, lin = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = s.tau(i, q) / s2;
      prec += w;
      lin += w * (s.resid(i, q) + old);
    }
    const double v = 1.0 / prec;
    const double draw = v * lin + std::sqrt(v) * rng.normal();
    s.params.mu(q) = draw;
    s.resid.col(q).array() -= draw - old;
  }
}

void update_A_block(SamplerState& s, const Dataset& data,
                    const Hyperparameters& h, Rng& rng) {
  const int S = s.S();
  if (S == 0) return;
  for (int q = 0; q < s.Q(); ++q) {
    const double s2 = s.params.sigma2(q);
    const Vector w = s.tau.col(q) / s2;
    const Vector e = s.resid.col(q) + data.X * s.params.A.row(q).transpose();
    Matrix prec = data.X.transpose() * w.asDiagonal() * data.X;
    const Vector lin = data.X.transpose() * w.cwiseProduct(e);
    prec.diagonal() +=
        (s.gamma_alpha.row(q).cwiseProduct(s.nu_alpha.row(q))).cwiseInverse().transpose();
    const Vector draw = draw_gaussian_from_precision(prec, lin, 1.0, rng);
    const Vector delta = draw - s.params.A.row(q).transpose();
    s.resid.col(q) -= data.X * delta;
    s.params.A.row(q) = draw.transpose();
  }
  spike_slab_sweep(s.params.A, s.gamma_alpha, s.nu_alpha, s.rho_alpha, false, h,
                   rng);
}

BTuning BTuning::make(int Q, double step) {
  BTuning t;
  t.step = Matrix::Constant(Q, Q, step);
  t.proposed = Eigen::MatrixXi::Zero(Q, Q);
  t.accepted = Eigen::MatrixXi::Zero(Q, Q);
  return t;
}

void BTuning::adapt(double low, double high) {
  for (Eigen::Index q = 0; q < step.rows(); ++q) {
    for (Eigen::Index k = 0; k < step.cols(); ++k) {
      if (proposed(q, k) == 0) continue;
      const double rate = static_cast<double>(accepted(q, k)) / proposed(q, k);
      if (rate < low) step(q, k) *= 0.7;
      else if (rate > high) step(q, k) *= 1.4;
    }
  }
  proposed.setZero();
  accepted.setZero();
}

namespace {

struct EntryStats {
  double cross;  // sum_i tau r Y_k
  double sq;     // sum_i tau Y_k^2
};

EntryStats entry_stats(const SamplerState& s, const Dataset& data, int q,
                       int k) {
  EntryStats st{0.0, 0.0};
  for (int i = 0; i < data.n(); ++i) {
    const double wy = s.tau(i, q) * data.Y(i, k);
    st.cross += wy * s.resid(i, q);
    st.sq += wy * data.Y(i, k);
  }
  return st;
}

double entry_log_ratio(const SamplerState& s, const EntryStats& st, int n,
                       int q, int k, double value, double logdet_new,
                       double logdet_old) {
  const double old = s.params.B(q, k);
  const double d = value - old;
  const double var = s.gamma_beta(q, k) * s.nu_beta(q, k);
  const double s2 = s.params.sigma2(q);
  return -(-2.0 * d * st.cross + d * d * st.sq) / (2.0 * s2) +
         n * (logdet_new - logdet_old) +
         (old * old - value * value) / (2.0 * var);
}

}  // namespace

double log_B_entry_conditional_ratio(const SamplerState& s, const Dataset& data,
                                     const Hyperparameters&, int q, int k,
                                     double value) {
  Matrix B = s.params.B;
  const double logdet_old = log_abs_det_i_minus(B);
  B(q, k) = value;
  const StabilityEval ev = evaluate_B(B);
  if (!ev.stable) return -kInf;
  return entry_log_ratio(s, entry_stats(s, data, q, k), data.n(), q, k, value,
                         ev.log_abs_det, logdet_old);
}

bool update_B_entry(SamplerState& s, const Dataset& data,
                    const Hyperparameters&, const SamplerOptions& options,
                    int q, int k, double step, Rng& rng) {
  const int n = data.n();
  const double old = s.params.B(q, k);
  const EntryStats st = entry_stats(s, data, q, k);

  double proposal;
  if (options.b_proposal == BProposal::random_walk) {
    proposal = old + step * rng.normal();
  } else {
    const double prec = 1.0 / (s.gamma_beta(q, k) * s.nu_beta(q, k)) +
                        st.sq / s.params.sigma2(q);
    const double mean = (st.cross + old * st.sq) / s.params.sigma2(q) / prec;
    proposal = mean + rng.normal() / std::sqrt(prec);
  }

  const double logdet_old = log_abs_det_i_minus(s.params.B);
  s.params.B(q, k) = proposal;
  const StabilityEval ev = evaluate_B(s.params.B);
  if (!ev.stable) {
    s.params.B(q, k) = old;
    return false;
  }
  double log_ratio;
  if (options.b_proposal == BProposal::random_walk) {
    s.params.B(q, k) = old;
    log_ratio = entry_log_ratio(s, st, n, q, k, proposal, ev.log_abs_det,
                                logdet_old);
  } else {
    log_ratio = n * (ev.log_abs_det - logdet_old);
  }
  if (std::log(rng.uniform()) < log_ratio) {
    s.params.B(q, k) = proposal;
    s.resid.col(q) -= (proposal - old) * data.Y.col(k);
    return true;
  }
  s.params.B(q, k) = old;
  return false;
}

void update_B_spike_slab(SamplerState& s, const Hyperparameters& h, Rng& rng) {
  spike_slab_sweep(s.params.B, s.gamma_beta, s.nu_beta, s.rho_beta, true, h,
                   rng);
}

void update_B_block(SamplerState& s, const Dataset& data,
                    const Hyperparameters& h, const SamplerOptions& options,
                    BTuning& tuning, Rng& rng) {
  const int Q = s.Q();
  std::vector<std::pair<int, int>> order;
  order.reserve(static_cast<std::size_t>(Q * (Q - 1)));
  for (int q = 0; q < Q; ++q)
    for (int k = 0; k < Q; ++k)
      if (q != k) order.emplace_back(q, k);
  std::shuffle(order.begin(), order.end(), rng);
  for (auto [q, k] : order) {
    const bool acc = update_B_entry(s, data, h, options, q, k,
                                    tuning.step(q, k), rng);
    ++tuning.proposed(q, k);
    ++tuning.total_proposed;
    if (acc) {
      ++tuning.accepted(q, k);
      ++tuning.total_accepted;
    }
  }
  update_B_spike_slab(s, h, rng);
}

void update_L_rows(SamplerState& s, const Dataset& data,
                   const Hyperparameters&, Rng& rng) {
  const int n = data.n();
  const std::vector<int> active = s.active_columns();
  if (active.empty()) return;
  for (int q = 0; q < s.Q(); ++q) {
    std::vector<int> K;
    for (int p : active)
      if (s.delta(q, p)) K.push_back(p);
    if (K.empty()) continue;
    const auto m = static_cast<Eigen::Index>(K.size());
    Matrix prec = Matrix::Identity(m, m) / s.kappa;
    Vector lin = Vector::Zero(m);
    for (int i = 0; i < n; ++i) {
      const double w = s.tau(i, q);
      double e = s.resid(i, q);
      for (int p : K) e += s.params.L(q, p) * s.C(i, p);
      for (Eigen::Index a = 0; a < m; ++a) {
        const double wc = w * s.C(i, K[static_cast<std::size_t>(a)]);
        lin(a) += wc * e;
        for (Eigen::Index b = a; b < m; ++b)
          prec(a, b) += wc * s.C(i, K[static_cast<std::size_t>(b)]);
      }
    }
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < a; ++b) prec(a, b) = prec(b, a);
    const Vector draw =
        draw_gaussian_from_precision(prec, lin, s.params.sigma2(q), rng);
    for (Eigen::Index a = 0; a < m; ++a) {
      const int p = K[static_cast<std::size_t>(a)];
      s.resid.col(q) -= (draw(a) - s.params.L(q, p)) * s.C.col(p);
      s.params.L(q, p) = draw(a);
    }
  }
}

namespace {

struct CollapsedStats {
  double scc;  // sum tau C_p^2
  double scr;  // sum tau C_p r, r excluding L(q, p) C_p
};

CollapsedStats collapsed_stats(const SamplerState& s, int q, int p) {
  CollapsedStats st{0.0, 0.0};
  const double l = s.params.L(q, p);
  for (int i = 0; i < s.n(); ++i) {
    const double wc = s.tau(i, q) * s.C(i, p);
    st.scc += wc * s.C(i, p);
    st.scr += wc * (s.resid(i, q) + l * s.C(i, p));
  }
  return st;
}

}  // namespace

double delta_log_odds(const SamplerState& s, int q, int p) {
  const CollapsedStats st = collapsed_stats(s, q, p);
  const double z = s.zeta(p);
  const double prior = std::log(z) - std::log1p(-z);
  if (std::isinf(prior)) return prior;
  const double k = s.kappa;
  return prior - 0.5 * std::log1p(k * st.scc) +
         st.scr * st.scr / (2.0 * s.params.sigma2(q) * (st.scc + 1.0 / k));
}

void update_delta(SamplerState& s, const Dataset&, const Hyperparameters&,
                  Rng& rng) {
  for (int p : s.active_columns()) {
    const int piv = s.pivots[static_cast<std::size_t>(p)];
    for (int q = piv + 1; q < s.Q(); ++q) {
      const double lo = delta_log_odds(s, q, p);
      const bool on = draw_bernoulli_logit(lo, rng);
      double value = 0.0;
      if (on) {
        const CollapsedStats st = collapsed_stats(s, q, p);
        const double prec = st.scc + 1.0 / s.kappa;
        value = st.scr / prec +
                std::sqrt(s.params.sigma2(q) / prec) * rng.normal();
      }
      s.resid.col(q) -= (value - s.params.L(q, p)) * s.C.col(p);
      s.params.L(q, p) = value;
      s.delta(q, p) = on ? 1 : 0;
    }
  }
}

void update_kappa(SamplerState& s, const Hyperparameters& h, Rng& rng) {
  double shape = h.a_kappa, scale = h.b_kappa;
  for (int p : s.active_columns()) {
    for (int q = 0; q < s.Q(); ++q) {
      if (!s.delta(q, p)) continue;
      shape += 0.5;
      scale += 0.5 * s.params.L(q, p) * s.params.L(q, p) / s.params.sigma2(q);
    }
  }
  s.kappa = draw_inverse_gamma(shape, scale, rng);
}

ZetaPosterior zeta_posterior(const SamplerState& s, int p) {
  const int piv = s.pivots[static_cast<std::size_t>(p)];
  const double d = s.column_count(p);
  const double aP = s.a1 * s.a2 / s.P_max();
  return {aP + d - 1.0, s.a2 + s.Q() - piv - d};
}

void update_zeta(SamplerState& s, Rng& rng) {
  for (int p : s.active_columns()) {
    const ZetaPosterior post = zeta_posterior(s, p);
    double z = draw_beta(post.alpha, post.beta, rng);
    // Keep strictly inside (0, 1) so the log-odds stay finite.
    z = std::clamp(z, 1e-300, 1.0 - 1e-16);
    s.zeta(p) = z;
  }
}

double log_a1_a2_target(const SamplerState& s, const Hyperparameters& h,
                        double a1, double a2) {
  const int P = s.P_max();
  double lt = log_inverse_gamma_pdf(a1, h.b1, h.c1) +
              log_inverse_gamma_pdf(a2, h.b2, h.c2);
  for (int p : s.active_columns()) {
    lt += log_beta_pdf(s.zeta(p), a1 * a2 / P, a2);
  }
  lt += log_column_count_prior(s.p_star(), P, a1, a2);
  return lt;
}

int update_a1_a2(SamplerState& s, const Hyperparameters& h,
                 const SamplerOptions& options, Rng& rng) {
  int accepted = 0;
  for (int coord = 0; coord < 2; ++coord) {
    const double cur = coord == 0 ? s.a1 : s.a2;
    const double prop = cur * std::exp(options.a_step * rng.normal());
    const double a1p = coord == 0 ? prop : s.a1;
    const double a2p = coord == 0 ? s.a2 : prop;
    const double log_ratio = log_a1_a2_target(s, h, a1p, a2p) -
                             log_a1_a2_target(s, h, s.a1, s.a2) +
                             std::log(prop) - std::log(cur);
    if (std::log(rng.uniform()) < log_ratio) {
      s.a1 = a1p;
      s.a2 = a2p;
      ++accepted;
    }
  }
  return accepted;
}

void update_C(SamplerState& s, const SamplerOptions& options, Rng& rng) {
  const std::vector<int> active = s.active_columns();
  const std::uint64_t seed = rng();
  if (active.empty()) return;
  const kernels::ConfounderInputs in{s.params.L, active, s.params.sigma2, s.tau};
  if (options.parallel_kernels) {
    kernels::omp::draw_confounders(in, seed, s.C, s.resid);
  } else {
    kernels::serial::draw_confounders(in, seed, s.C, s.resid);
  }
}

void update_tau(SamplerState& s, const SamplerOptions& options, Rng& rng) {
  const std::uint64_t seed = rng();
  if (options.parallel_kernels) {
    kernels::omp::draw_tau(s.resid, s.params.sigma2, options.residual_floor,
                           seed, s.tau);
  } else {
    kernels::serial::draw_tau(s.resid, s.params.sigma2, options.residual_floor,
                              seed, s.tau);
  }
}

InverseGammaParams sigma2_posterior(const SamplerState& s,
                                    const Hyperparameters& h,
                                    Sigma2Conditional variant, int q) {
  InverseGammaParams out{h.a_sigma + 0.5 * s.n(), h.b_sigma};
  for (int i = 0; i < s.n(); ++i) {
    out.scale += 0.5 * s.resid(i, q) * s.resid(i, q) * s.tau(i, q);
  }
  if (variant == Sigma2Conditional::exact) {
    for (int p : s.active_columns()) {
      if (!s.delta(q, p)) continue;
      out.shape += 0.5;
      out.scale += 0.5 * s.params.L(q, p) * s.params.L(q, p) / s.kappa;
    }
  }
  return out;
}

void update_sigma2(SamplerState& s, const Hyperparameters& h,
                   const SamplerOptions& options, Rng& rng) {
  for (int q = 0; q < s.Q(); ++q) {
    const InverseGammaParams post =
        sigma2_posterior(s, h, options.sigma2_conditional, q);
    s.params.sigma2(q) = draw_inverse_gamma(post.shape, post.scale, rng);
  }
}

}  // namespace baycausal

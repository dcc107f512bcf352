#include "baycausal/state.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "baycausal/kernels.hpp"

namespace baycausal {

void MoveConfig::validate() const {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(std::string(name) + " must lie in [0, 1]");
    }
  };
  prob(p_shift, "p_shift");
  prob(p_switch, "p_switch");
  prob(p_add, "p_add");
  prob(p_split_merge, "p_split_merge");
  if (p_shift + p_switch > 1.0) {
    throw ValidationError("p_shift + p_switch must not exceed 1");
  }
}

int SamplerState::p_star() const {
  int k = 0;
  for (int piv : pivots) k += piv >= 0 ? 1 : 0;
  return k;
}

int SamplerState::p_single() const {
  int k = 0;
  for (int p = 0; p < P_max(); ++p) {
    if (is_active(p) && column_count(p) == 1) ++k;
  }
  return k;
}

std::vector<int> SamplerState::active_columns() const {
  std::vector<int> out;
  for (int p = 0; p < P_max(); ++p)
    if (is_active(p)) out.push_back(p);
  return out;
}

std::vector<int> SamplerState::unused_rows() const {
  std::vector<bool> used(static_cast<std::size_t>(Q()), false);
  for (int piv : pivots)
    if (piv >= 0) used[static_cast<std::size_t>(piv)] = true;
  std::vector<int> out;
  for (int q = 0; q < Q(); ++q)
    if (!used[static_cast<std::size_t>(q)]) out.push_back(q);
  return out;
}

int SamplerState::column_count(int p) const { return delta.col(p).sum(); }

void recompute_residuals(SamplerState& state, const Dataset& data,
                         bool parallel) {
  if (parallel) {
    kernels::omp::residuals(data, state.params, state.C, state.resid);
  } else {
    kernels::serial::residuals(data, state.params, state.C, state.resid);
  }
}

void validate_dataset(const Dataset& data) {
  if (data.n() < 1) throw ValidationError("dataset has no observations");
  if (data.Q() < 1) throw ValidationError("dataset has no primary variables");
  if (data.X.rows() != data.Y.rows()) {
    throw DimensionError("X and Y must have the same number of rows");
  }
  if (!data.Y.allFinite() || !data.X.allFinite()) {
    throw ValidationError("dataset contains non-finite values");
  }
  for (int q = 0; q < data.Q(); ++q) {
    const auto col = data.Y.col(q);
    if ((col.array() == col(0)).all()) {
      std::ostringstream os;
      os << "primary variable Y" << q + 1 << " is constant";
      throw ValidationError(os.str());
    }
  }
}

SamplerState initialize_state(const Dataset& data, const Hyperparameters& hyper,
                              Rng& rng) {
  (void)rng;
  validate_dataset(data);
  const int n = data.n(), Q = data.Q(), S = data.S();
  const Hyperparameters h = hyper.resolve(Q);
  const int P = h.P_max;

  SamplerState s;
  s.params.mu = data.Y.colwise().mean().transpose();
  s.params.A = Matrix::Zero(Q, S);
  s.params.B = Matrix::Zero(Q, Q);
  s.params.L = Matrix::Zero(Q, P);
  s.params.sigma2.resize(Q);
  for (int q = 0; q < Q; ++q) {
    const double var = (data.Y.col(q).array() - s.params.mu(q)).square().sum() /
                       std::max(1, n - 1);
    s.params.sigma2(q) = var / 8.0;
  }
  s.gamma_alpha = Matrix::Ones(Q, S);
  s.nu_alpha = Matrix::Ones(Q, S);
  s.rho_alpha = h.a_rho / (h.a_rho + h.b_rho);
  s.gamma_beta = Matrix::Ones(Q, Q);
  s.gamma_beta.diagonal().setZero();
  s.nu_beta = Matrix::Ones(Q, Q);
  s.nu_beta.diagonal().setZero();
  s.rho_beta = h.a_rho / (h.a_rho + h.b_rho);

  s.delta = Eigen::MatrixXi::Zero(Q, P);
  s.pivots.assign(static_cast<std::size_t>(P), -1);
  s.zeta = Vector::Constant(P, 0.5);
  auto ig_mean = [](double a, double b) { return a > 1.0 ? b / (a - 1.0) : 1.0; };
  s.kappa = ig_mean(h.a_kappa, h.b_kappa);
  s.a1 = ig_mean(h.b1, h.c1);
  s.a2 = ig_mean(h.b2, h.c2);

  s.C = Matrix::Zero(n, P);
  s.tau = Matrix::Ones(n, Q);
  recompute_residuals(s, data);
  return s;
}

double log_column_count_prior(int p_star, int P_max, double a1, double a2) {
  if (P_max <= 0) return 0.0;
  const double aP = a1 * a2 / P_max;
  double acc = 0.0;
  for (int k = 0; k < p_star; ++k) {
    acc += std::log(aP * (P_max - k) / (a2 - 1.0 + P_max - k));
  }
  return acc;
}

double log_delta_column_prior(const SamplerState& state, int p) {
  const int piv = state.pivots[static_cast<std::size_t>(p)];
  if (piv < 0) return 0.0;
  const double z = state.zeta(p);
  double acc = 0.0;
  for (int q = piv + 1; q < state.Q(); ++q) {
    acc += state.delta(q, p) ? std::log(z) : std::log1p(-z);
  }
  return acc;
}

double log_joint_density(const SamplerState& s, const Dataset& data,
                         const Hyperparameters& hyper) {
  const int n = data.n(), Q = s.Q(), S = s.S(), P = s.P_max();
  const Hyperparameters& h = hyper;
  double lj = 0.0;

  if (!(spectral_radius(s.params.B) < 1.0)) return -kInf;
  lj += n * log_abs_det_i_minus(s.params.B);
  for (int q = 0; q < Q; ++q) {
    const double s2 = s.params.sigma2(q);
    for (int i = 0; i < n; ++i) {
      lj += log_normal_pdf(s.resid(i, q), 0.0, s2 / s.tau(i, q));
      lj += log_inverse_gamma_pdf(s.tau(i, q), 1.0, 0.125);
    }
    lj += log_inverse_gamma_pdf(s2, h.a_sigma, h.b_sigma);
    lj += log_normal_pdf(s.params.mu(q), 0.0, h.sigma2_mu);
  }

  auto spike_slab = [&](double coef, double gamma, double nu, double rho) {
    double v = log_normal_pdf(coef, 0.0, gamma * nu);
    v += log_inverse_gamma_pdf(nu, h.a_nu, h.b_nu);
    v += gamma == 1.0 ? std::log(rho) : std::log1p(-rho);
    return v;
  };
  for (int q = 0; q < Q; ++q)
    for (int k = 0; k < S; ++k)
      lj += spike_slab(s.params.A(q, k), s.gamma_alpha(q, k), s.nu_alpha(q, k),
                       s.rho_alpha);
  if (S > 0) lj += log_beta_pdf(s.rho_alpha, h.a_rho, h.b_rho);
  for (int q = 0; q < Q; ++q)
    for (int k = 0; k < Q; ++k)
      if (q != k)
        lj += spike_slab(s.params.B(q, k), s.gamma_beta(q, k), s.nu_beta(q, k),
                         s.rho_beta);
  if (Q > 1) lj += log_beta_pdf(s.rho_beta, h.a_rho, h.b_rho);

  const int p_star = s.p_star();
  const double aP = P > 0 ? s.a1 * s.a2 / P : 1.0;
  for (int p = 0; p < P; ++p) {
    if (!s.is_active(p)) continue;
    for (int q = 0; q < Q; ++q) {
      if (s.delta(q, p)) {
        lj += log_normal_pdf(s.params.L(q, p), 0.0, s.kappa * s.params.sigma2(q));
      }
    }
    lj += log_delta_column_prior(s, p);
    lj += log_beta_pdf(s.zeta(p), aP, s.a2);
    for (int i = 0; i < n; ++i) lj += log_normal_pdf(s.C(i, p), 0.0, 1.0);
  }
  // Uniform prior over ordered assignments of distinct pivot rows.
  for (int k = 0; k < p_star; ++k) lj -= std::log(static_cast<double>(Q - k));
  lj += log_column_count_prior(p_star, P, s.a1, s.a2);
  lj += log_inverse_gamma_pdf(s.kappa, h.a_kappa, h.b_kappa);
  lj += log_inverse_gamma_pdf(s.a1, h.b1, h.c1);
  lj += log_inverse_gamma_pdf(s.a2, h.b2, h.c2);
  return lj;
}

void check_state_invariants(const SamplerState& s, const Dataset& data,
                            const Hyperparameters& hyper) {
  auto fail = [](const std::string& what) { throw std::logic_error(what); };
  const int Q = s.Q();
  for (int q = 0; q < Q; ++q) {
    if (s.params.B(q, q) != 0.0) fail("B has a non-zero diagonal entry");
  }
  if (!(spectral_radius(s.params.B) < 1.0)) fail("B is not stable");
  for (int q = 0; q < Q; ++q)
    for (int k = 0; k < s.S(); ++k) {
      const double g = s.gamma_alpha(q, k);
      if (g != 1.0 && g != hyper.nu0) fail("gamma_alpha outside {nu0, 1}");
    }
  for (int q = 0; q < Q; ++q)
    for (int k = 0; k < Q; ++k) {
      if (q == k) continue;
      const double g = s.gamma_beta(q, k);
      if (g != 1.0 && g != hyper.nu0) fail("gamma_beta outside {nu0, 1}");
    }
  std::vector<int> seen;
  for (int p = 0; p < s.P_max(); ++p) {
    const int piv = s.pivots[static_cast<std::size_t>(p)];
    for (int q = 0; q < Q; ++q) {
      const bool on = s.delta(q, p) != 0;
      if (on != (s.params.L(q, p) != 0.0)) fail("L and delta disagree");
      if (piv < 0 && on) fail("inactive column has non-zero delta");
      if (piv >= 0 && q < piv && on) fail("delta non-zero above pivot");
      if (piv >= 0 && q == piv && !on) fail("pivot entry of delta is zero");
    }
    if (piv < 0) {
      if (!(s.C.col(p).array() == 0.0).all()) fail("inactive C column non-zero");
      continue;
    }
    for (int other : seen)
      if (other == piv) fail("pivot rows are not distinct");
    seen.push_back(piv);
  }
  Matrix fresh;
  kernels::serial::residuals(data, s.params, s.C, fresh);
  const double drift = (fresh - s.resid).cwiseAbs().maxCoeff();
  if (drift > 1e-8) {
    std::ostringstream os;
    os << "cached residuals drifted by " << drift;
    fail(os.str());
  }
}

}  // namespace baycausal

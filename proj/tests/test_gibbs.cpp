#include <cmath>

#include "doctest.h"
#include "baycausal/gibbs_updates.hpp"
#include "baycausal/kernels.hpp"
#include "oracles.hpp"

using namespace baycausal;
namespace orc = baycausal::oracle;

namespace {

Dataset data_of(const Matrix& Y, int S = 0) {
  Dataset d;
  d.Y = Y;
  d.X = Matrix::Zero(Y.rows(), S);
  return d;
}

Hyperparameters hyper_for(int Q, int P_max = 1) {
  Hyperparameters h;
  h.P_max = P_max;
  return h.resolve(Q);
}

struct Moments {
  double mean, var, se;
};

Moments moments(const std::vector<double>& x) {
  return {orc::mean(x), orc::variance(x), orc::batch_means_se(x)};
}

}  // namespace

TEST_SUITE("gibbs") {

TEST_CASE("mu with no data is drawn from its prior") {
  const Dataset d = data_of(Matrix::Zero(0, 2));
  Hyperparameters h = hyper_for(2);
  h.sigma2_mu = 4.0;
  SamplerState s = orc::toy_state(d, 1);
  Rng rng(1);
  std::vector<double> x;
  for (int t = 0; t < 100000; ++t) {
    update_mu(s, d, h, rng);
    x.push_back(s.params.mu(1));
  }
  const Moments m = moments(x);
  CHECK(std::abs(m.mean) < 4.0 * m.se);
  CHECK(m.var == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("mu from one observation with tau 4") {
  // V = 1 / (1 + 4) = 0.2, m = 0.2 * 4 * 2 = 1.6
  const Dataset d = data_of(Matrix::Constant(1, 1, 2.0));
  Hyperparameters h = hyper_for(2);
  h.sigma2_mu = 1.0;
  SamplerState s = orc::toy_state(d, 1);
  s.tau(0, 0) = 4.0;
  Rng rng(2);
  std::vector<double> x;
  for (int t = 0; t < 100000; ++t) {
    update_mu(s, d, h, rng);
    x.push_back(s.params.mu(0));
  }
  const Moments m = moments(x);
  CHECK(std::abs(m.mean - 1.6) < 4.0 * m.se);
  CHECK(m.var == doctest::Approx(0.2).epsilon(0.03));
  CHECK(std::abs(s.resid(0, 0) - (2.0 - s.params.mu(0))) < 1e-14);
}

TEST_CASE("mu approaches the residual mean under a flat prior") {
  Matrix Y(4, 1);
  Y << 1.0, 2.0, 4.0, 9.0;
  const Dataset d = data_of(Y);
  Hyperparameters h = hyper_for(2);
  h.sigma2_mu = 1e12;
  SamplerState s = orc::toy_state(d, 1);
  s.params.sigma2(0) = 1e-8;  // posterior variance 2.5e-9
  Rng rng(3);
  update_mu(s, d, h, rng);
  CHECK(s.params.mu(0) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("B proposal at the current value and unstable proposals") {
  Rng rng(4);
  const SimulatedData sim = generate_data(scenario_one(), 30, covariates::StandardNormal{}, rng);
  const Hyperparameters h = hyper_for(5, 4);
  SamplerState s = orc::toy_state(sim.data, 4);
  s.params.B(0, 1) = 0.3;
  recompute_residuals(s, sim.data, false);
  CHECK(log_B_entry_conditional_ratio(s, sim.data, h, 0, 1, 0.3) == 0.0);
  s.params.B(1, 0) = 2.0;
  s.params.B(0, 1) = 0.0;
  recompute_residuals(s, sim.data, false);
  // B(0,1) * B(1,0) >= 1 makes the 2-cycle unstable
  CHECK(log_B_entry_conditional_ratio(s, sim.data, h, 0, 1, 0.5) == -kInf);
  CHECK(log_B_entry_conditional_ratio(s, sim.data, h, 0, 1, 0.6) == -kInf);
  SamplerOptions opt;
  for (int t = 0; t < 200; ++t) {
    update_B_entry(s, sim.data, h, opt, 0, 1, 5.0, rng);
    CHECK(check_stability(s.params.B));
  }
}

TEST_CASE("L rows with no data follow the prior and empty rows are skipped") {
  const Dataset d = data_of(Matrix::Zero(0, 3));
  const Hyperparameters h = hyper_for(3, 1);
  SamplerState s = orc::toy_state(d, 1);
  orc::set_column(s, 0, 0, {0, 2}, 0.5);
  s.kappa = 2.0;
  s.params.sigma2 << 0.5, 1.0, 1.5;
  Rng rng(5);
  std::vector<double> x;
  for (int t = 0; t < 100000; ++t) {
    update_L_rows(s, d, h, rng);
    x.push_back(s.params.L(2, 0));
    REQUIRE(s.params.L(1, 0) == 0.0);
  }
  const Moments m = moments(x);
  CHECK(std::abs(m.mean) < 4.0 * m.se);
  CHECK(m.var == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("scalar L row matches the conjugate normal posterior") {
  Rng rng(6);
  const int n = 40;
  Matrix Y(n, 1);
  Matrix C(n, 1);
  for (int i = 0; i < n; ++i) {
    C(i, 0) = rng.normal();
    Y(i, 0) = 0.8 * C(i, 0) + 0.3 * rng.normal();
  }
  const Dataset d = data_of(Y);
  Hyperparameters h;
  h.P_max = 1;
  h = h.resolve(2);
  SamplerState s = orc::toy_state(d, 1);
  orc::set_column(s, 0, 0, {0}, 0.0);
  s.C.col(0) = C.col(0);
  s.kappa = 1.5;
  s.params.sigma2(0) = 0.09;
  for (int i = 0; i < n; ++i) s.tau(i, 0) = 0.5 + 0.01 * i;
  recompute_residuals(s, d, false);
  double prec = 1.0 / (s.kappa * 0.09), lin = 0.0;
  for (int i = 0; i < n; ++i) {
    prec += s.tau(i, 0) * C(i, 0) * C(i, 0) / 0.09;
    lin += s.tau(i, 0) * C(i, 0) * Y(i, 0) / 0.09;
  }
  std::vector<double> x;
  for (int t = 0; t < 50000; ++t) {
    update_L_rows(s, d, h, rng);
    x.push_back(s.params.L(0, 0));
  }
  const Moments m = moments(x);
  CHECK(std::abs(m.mean - lin / prec) < 4.0 * m.se);
  CHECK(m.var == doctest::Approx(1.0 / prec).epsilon(0.04));
}

TEST_CASE("delta is forced by zeta of 0 or 1") {
  Rng rng(7);
  const SimulatedData sim = generate_data(scenario_one(), 50, covariates::StandardNormal{}, rng);
  const Hyperparameters h = hyper_for(5, 2);
  SamplerState s = orc::toy_state(sim.data, 2);
  orc::set_column(s, 0, 1, {1, 3}, 0.4);
  for (int i = 0; i < 50; ++i) s.C(i, 0) = rng.normal();
  recompute_residuals(s, sim.data, false);
  s.zeta(0) = 0.0;
  update_delta(s, sim.data, h, rng);
  CHECK(s.delta.col(0).sum() == 1);
  CHECK(s.delta(1, 0) == 1);
  CHECK(s.delta(0, 0) == 0);
  s.zeta(0) = 1.0;
  update_delta(s, sim.data, h, rng);
  CHECK(s.delta.col(0).tail(4).sum() == 4);
  CHECK(s.delta(0, 0) == 0);
  CHECK(check_uglt(s.params.L).ok);
}

TEST_CASE("kappa conditionals") {
  const Dataset d = data_of(Matrix::Zero(0, 2));
  Hyperparameters h = hyper_for(2, 1);
  h.a_kappa = 3.0;
  h.b_kappa = 2.0;
  SamplerState s = orc::toy_state(d, 1);
  Rng rng(8);
  std::vector<double> x;
  for (int t = 0; t < 100000; ++t) {
    update_kappa(s, h, rng);
    x.push_back(s.kappa);
  }
  Moments m = moments(x);
  CHECK(std::abs(m.mean - 1.0) < 4.0 * m.se);

  // one loading 2 with sigma2 = 1 and a = b = 1: IG(1.5, 3), so 1/kappa ~ Gamma(1.5, rate 3)
  h.a_kappa = h.b_kappa = 1.0;
  orc::set_column(s, 0, 0, {0}, 2.0);
  x.clear();
  for (int t = 0; t < 100000; ++t) {
    update_kappa(s, h, rng);
    x.push_back(1.0 / s.kappa);
  }
  m = moments(x);
  CHECK(std::abs(m.mean - 0.5) < 4.0 * m.se);
  CHECK(m.var == doctest::Approx(1.5 / 9.0).epsilon(0.03));
}

TEST_CASE("zeta posterior parameters") {
  const Dataset d = data_of(Matrix::Zero(0, 5));
  SamplerState s = orc::toy_state(d, 4);
  s.a1 = 2.0;
  s.a2 = 3.0;
  const double aP = 2.0 * 3.0 / 4.0;
  orc::set_column(s, 0, 2, {2});
  ZetaPosterior z = zeta_posterior(s, 0);
  CHECK(z.alpha == doctest::Approx(aP));
  CHECK(z.beta == doctest::Approx(3.0 + 5 - 3));  // a2 + Q - pivot (1-based)
  orc::set_column(s, 0, 2, {2, 3, 4});
  z = zeta_posterior(s, 0);
  CHECK(z.alpha == doctest::Approx(aP + 2));
  CHECK(z.beta == doctest::Approx(3.0));
  // the Scenario I truth: column with pivot Y2 and children {Y2, Y3}
  orc::set_column(s, 1, 1, {1, 2});
  z = zeta_posterior(s, 1);
  CHECK(z.alpha == doctest::Approx(2.5));
  CHECK(z.beta == doctest::Approx(5.0));
}

TEST_CASE("a1 a2 with no active columns follow their priors") {
  const Dataset d = data_of(Matrix::Zero(0, 5));
  const Hyperparameters h = hyper_for(5, 4);  // b = 6, c = 4.5
  SamplerState s = orc::toy_state(d, 4);
  s.a1 = s.a2 = 0.9;
  CHECK(log_a1_a2_target(s, h, 0.7, 1.3) - log_a1_a2_target(s, h, 0.7, 1.3) == 0.0);
  SamplerOptions opt;
  opt.a_step = 0.5;
  Rng rng(9);
  std::vector<double> x1, x2;
  for (int t = 0; t < 200000; ++t) {
    update_a1_a2(s, h, opt, rng);
    x1.push_back(s.a1);
    x2.push_back(s.a2);
  }
  const Moments m1 = moments(x1), m2 = moments(x2);
  CHECK(std::abs(m1.mean - 0.9) < 4.0 * m1.se);
  CHECK(std::abs(m2.mean - 0.9) < 4.0 * m2.se);
}

TEST_CASE("confounders without loadings follow N(0, 1), scalar case is conjugate") {
  const Dataset d = data_of(Matrix::Constant(1, 1, 0.7));
  SamplerState s = orc::toy_state(d, 1);
  orc::set_column(s, 0, 0, {0}, 0.0);
  recompute_residuals(s, d, false);
  SamplerOptions opt;
  opt.parallel_kernels = false;
  Rng rng(10);
  std::vector<double> x;
  for (int t = 0; t < 100000; ++t) {
    update_C(s, opt, rng);
    x.push_back(s.C(0, 0));
  }
  Moments m = moments(x);
  CHECK(std::abs(m.mean) < 4.0 * m.se);
  CHECK(m.var == doctest::Approx(1.0).epsilon(0.03));

  // y = 0.7, L = 1.2, sigma2 = 0.5, tau = 2: precision 1 + 1.44 * 2 / 0.5
  s.params.L(0, 0) = 1.2;
  s.params.sigma2(0) = 0.5;
  s.tau(0, 0) = 2.0;
  recompute_residuals(s, d, false);
  const double prec = 1.0 + 1.44 * 2.0 / 0.5;
  const double mean = 1.2 * 2.0 * 0.7 / 0.5 / prec;
  x.clear();
  for (int t = 0; t < 100000; ++t) {
    update_C(s, opt, rng);
    x.push_back(s.C(0, 0));
  }
  m = moments(x);
  CHECK(std::abs(m.mean - mean) < 4.0 * m.se);
  CHECK(m.var == doctest::Approx(1.0 / prec).epsilon(0.03));
  CHECK(std::abs(s.resid(0, 0) - (0.7 - 1.2 * s.C(0, 0))) < 1e-14);
}

TEST_CASE("tau conditional is inverse Gaussian(sigma / 2|r|, 1/4)") {
  const int n = 400000;
  const Matrix r = Matrix::Constant(n, 1, 0.5);
  Matrix tau(n, 1);
  kernels::serial::draw_tau(r, Vector::Ones(1), 1e-8, 77, tau);
  std::vector<double> x(tau.data(), tau.data() + n);
  CHECK(std::abs(orc::mean(x) - 1.0) < 4.0 * std::sqrt(4.0 / n));
  CHECK(orc::variance(x) == doctest::Approx(4.0).epsilon(0.06));
  const Matrix zero = Matrix::Zero(10, 1);
  Matrix t0(10, 1);
  kernels::serial::draw_tau(zero, Vector::Ones(1), 1e-8, 78, t0);
  CHECK(t0.allFinite());
  CHECK(t0.minCoeff() > 0.0);
}

TEST_CASE("alternating tau and error draws keep the Laplace marginal") {
  const double s2 = 1.0 / 16.0;
  Rng rng(11);
  double e = draw_laplace_via_mixture(s2, rng).e;
  Matrix r(1, 1), tau(1, 1);
  std::vector<double> kept;
  for (int t = 0; t < 500000; ++t) {
    r(0, 0) = e;
    kernels::serial::draw_tau(r, Vector::Constant(1, s2), 1e-12, derive_seed(5, {std::uint64_t(t)}), tau);
    e = std::sqrt(s2 / tau(0, 0)) * rng.normal();
    if (t % 5 == 0) kept.push_back(e);
  }
  const double b = 2.0 * std::sqrt(s2);
  auto cdf = [b](double x) { return x < 0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b); };
  CHECK(orc::ks_statistic(kept, cdf) < orc::ks_critical(kept.size()));
}

TEST_CASE("sigma2 conditional parameters") {
  const Dataset empty = data_of(Matrix::Zero(0, 1));
  Hyperparameters h = hyper_for(2, 1);
  h.a_sigma = 1.0;
  h.b_sigma = 1.0;
  SamplerState s0 = orc::toy_state(empty, 1);
  InverseGammaParams ig = sigma2_posterior(s0, h, Sigma2Conditional::approximate, 0);
  CHECK(ig.shape == 1.0);
  CHECK(ig.scale == 1.0);

  Matrix Y(2, 1);
  Y << 1.0, -1.0;
  const Dataset d = data_of(Y);
  SamplerState s = orc::toy_state(d, 1);
  ig = sigma2_posterior(s, h, Sigma2Conditional::approximate, 0);
  CHECK(ig.shape == doctest::Approx(2.0));
  CHECK(ig.scale == doctest::Approx(2.0));
  // the exact variant adds the loading prior: one loading 0.6, kappa 2
  orc::set_column(s, 0, 0, {0}, 0.6);
  s.kappa = 2.0;
  recompute_residuals(s, d, false);
  const InverseGammaParams a = sigma2_posterior(s, h, Sigma2Conditional::approximate, 0);
  const InverseGammaParams x = sigma2_posterior(s, h, Sigma2Conditional::exact, 0);
  CHECK(x.shape == doctest::Approx(a.shape + 0.5));
  CHECK(x.scale == doctest::Approx(a.scale + 0.36 / 4.0));
}

TEST_CASE("closed-form conditionals match quadrature on toys") {
  for (const orc::ConjugateCheck& c : orc::conjugate_checks(30000, 3)) {
    INFO(c.name);
    CHECK(c.tv < 0.05);
  }
}

TEST_CASE("Metropolis updates match quadrature on toys") {
  for (const orc::ConjugateCheck& c : orc::metropolis_checks(30000, 4)) {
    INFO(c.name);
    CHECK(c.tv < 0.05);
  }
}

}

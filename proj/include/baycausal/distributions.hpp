#pragma once

#include <limits>

#include "baycausal/rng.hpp"

namespace baycausal {

// Prior hyperparameters. Defaults are the settings used for the bundled
// scenarios; c1 = c2 = 6 (P_max - 1) / P_max is filled in by `resolve` once
// P_max is known.
struct Hyperparameters {
  double a_nu = 1.0, b_nu = 1.0;
  double a_rho = 1.0, b_rho = 1.0;
  double a_sigma = 1.0, b_sigma = 1.0;
  double a_kappa = 1.0, b_kappa = 1.0;
  double nu0 = 2.5e-4;
  double sigma2_mu = 100.0;
  double b1 = 6.0, c1 = -1.0;
  double b2 = 6.0, c2 = -1.0;
  int P_max = -1;  // -1: Q - 1

  // Fills P_max/c1/c2 defaults for Q primary variables and validates.
  Hyperparameters resolve(int Q) const;
  void validate(int Q) const;
};

double draw_gamma(double shape, double rate, Rng& rng);

// Density proportional to x^(-shape-1) exp(-scale / x).
double draw_inverse_gamma(double shape, double scale, Rng& rng);

// Wald law with E[X] = mean and shape lambda (Michael-Schucany-Haas).
double draw_inverse_gaussian(double mean, double shape, Rng& rng);

double draw_beta(double a, double b, Rng& rng);

struct LaplaceDraw {
  double e;
  double tau;
};

// tau ~ InverseGamma(1, 1/8), e | tau ~ N(0, sigma2 / tau); marginally e is
// Laplace with scale 2 sqrt(sigma2) and variance 8 sigma2.
LaplaceDraw draw_laplace_via_mixture(double sigma2, Rng& rng);

// Log posterior odds of slab (gamma = 1) against spike (gamma = nu0) for a
// coefficient `value` with slab variance `nu`. Returns -inf / +inf when rho
// is 0 / 1.
double spike_slab_log_odds(double value, double nu, double nu0, double rho);

// Bernoulli draw with success log-odds `log_odds`.
bool draw_bernoulli_logit(double log_odds, Rng& rng);

double log_normal_pdf(double x, double mean, double var);
double log_inverse_gamma_pdf(double x, double shape, double scale);
double log_gamma_pdf(double x, double shape, double rate);
double log_beta_pdf(double x, double a, double b);
double log_inverse_gaussian_pdf(double x, double mean, double shape);

double laplace_cdf(double x, double scale);
double inverse_gaussian_cdf(double x, double mean, double shape);

inline constexpr double kLogTwoPi = 1.8378770664093454836;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace baycausal

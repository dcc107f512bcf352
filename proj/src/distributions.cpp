#include "baycausal/distributions.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "baycausal/types.hpp"

namespace baycausal {

Hyperparameters Hyperparameters::resolve(int Q) const {
  Hyperparameters h = *this;
  if (h.P_max < 0) h.P_max = Q - 1;
  const double P = std::max(1, h.P_max);
  if (h.c1 < 0) h.c1 = 6.0 * (P - 1.0) / P;
  if (h.c2 < 0) h.c2 = 6.0 * (P - 1.0) / P;
  // With P_max = 1 the default rate degenerates to 0; fall back to a proper prior.
  if (h.c1 == 0.0) h.c1 = 1.0;
  if (h.c2 == 0.0) h.c2 = 1.0;
  h.validate(Q);
  return h;
}

void Hyperparameters::validate(int Q) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("hyperparameter ") + name +
                            " must be strictly positive");
    }
  };
  positive(a_nu, "a_nu");
  positive(b_nu, "b_nu");
  positive(a_rho, "a_rho");
  positive(b_rho, "b_rho");
  positive(a_sigma, "a_sigma");
  positive(b_sigma, "b_sigma");
  positive(a_kappa, "a_kappa");
  positive(b_kappa, "b_kappa");
  positive(nu0, "nu0");
  positive(sigma2_mu, "sigma2_mu");
  positive(b1, "b1");
  positive(c1, "c1");
  positive(b2, "b2");
  positive(c2, "c2");
  if (nu0 >= 1.0) throw ValidationError("nu0 must be < 1");
  if (P_max < 0 || P_max >= std::max(Q, 1)) {
    std::ostringstream os;
    os << "P_max must satisfy 0 <= P_max < Q (got " << P_max << ", Q=" << Q
       << ")";
    throw ValidationError(os.str());
  }
}

double draw_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("draw_gamma: shape and rate must be positive");
  }
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double draw_inverse_gamma(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::domain_error("draw_inverse_gamma: parameters must be positive");
  }
  const double g = draw_gamma(shape, scale, rng);
  return 1.0 / std::max(g, std::numeric_limits<double>::min());
}

double draw_inverse_gaussian(double mean, double shape, Rng& rng) {
  if (!(mean > 0.0) || !(shape > 0.0)) {
    throw std::domain_error(
        "draw_inverse_gaussian: mean and shape must be positive");
  }
  const double nu = rng.normal();
  const double y = nu * nu;
  const double my = mean * y;
  // The two roots of the transformation multiply to mean^2; the smaller one
  // is taken from the larger to avoid cancellation.
  const double big = mean + mean * my / (2.0 * shape) +
                     (mean / (2.0 * shape)) * std::sqrt(4.0 * shape * my + my * my);
  const double small = mean * mean / big;
  if (rng.uniform() <= mean / (mean + small)) return small;
  return big;
}

double draw_beta(double a, double b, Rng& rng) {
  const double x = draw_gamma(a, 1.0, rng);
  const double y = draw_gamma(b, 1.0, rng);
  const double s = x + y;
  if (s <= 0.0) {
    // Both gammas underflowed (tiny shapes); pick an endpoint by the mean.
    return rng.uniform() < a / (a + b) ? 1.0 - 1e-300 : 1e-300;
  }
  return x / s;
}

LaplaceDraw draw_laplace_via_mixture(double sigma2, Rng& rng) {
  const double tau = draw_inverse_gamma(1.0, 1.0 / 8.0, rng);
  return {rng.normal() * std::sqrt(sigma2 / tau), tau};
}

double spike_slab_log_odds(double value, double nu, double nu0, double rho) {
  if (rho <= 0.0) return -kInf;
  if (rho >= 1.0) return kInf;
  return 0.5 * std::log(nu0) + std::log(rho) - std::log1p(-rho) +
         (1.0 - nu0) * value * value / (2.0 * nu0 * nu);
}

bool draw_bernoulli_logit(double log_odds, Rng& rng) {
  if (log_odds == kInf) return true;
  if (log_odds == -kInf) return false;
  // p = 1 / (1 + exp(-lo)), evaluated without overflow.
  const double p = log_odds >= 0 ? 1.0 / (1.0 + std::exp(-log_odds))
                                 : std::exp(log_odds) / (1.0 + std::exp(log_odds));
  return rng.uniform() < p;
}

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

double log_inverse_gamma_pdf(double x, double shape, double scale) {
  if (x <= 0.0) return -kInf;
  return shape * std::log(scale) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - scale / x;
}

double log_gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return -kInf;
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double log_beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return -kInf;
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
         (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
}

double log_inverse_gaussian_pdf(double x, double mean, double shape) {
  if (x <= 0.0) return -kInf;
  const double d = x - mean;
  return 0.5 * (std::log(shape) - kLogTwoPi - 3.0 * std::log(x)) -
         shape * d * d / (2.0 * mean * mean * x);
}

double laplace_cdf(double x, double scale) {
  return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

namespace {
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
}  // namespace

double inverse_gaussian_cdf(double x, double mean, double shape) {
  if (x <= 0.0) return 0.0;
  const double r = std::sqrt(shape / x);
  const double a = std_normal_cdf(r * (x / mean - 1.0));
  // exp(2 shape / mean) * Phi(-r (x/mean + 1)), combined in log space.
  const double z = -r * (x / mean + 1.0);
  const double log_tail = std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
  return a + std::exp(2.0 * shape / mean + log_tail);
}

}  // namespace baycausal

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "baycausal/inference.hpp"

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls the density helpers of the library
// it checks; densities are written out from the model definition.
namespace baycausal::oracle {

// Kolmogorov-Smirnov statistic of `draws` against `cdf`.
double ks_statistic(std::vector<double> draws,
                    const std::function<double(double)>& cdf);
// Asymptotic critical value sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double ks_critical(std::size_t n, double alpha = 0.01);

// CDF obtained by Simpson integration of an unnormalized log density on
// [lo, hi], normalized over that interval, linearly interpolated.
class NumericCdf {
 public:
  NumericCdf(const std::function<double(double)>& log_density, double lo,
             double hi, int intervals = 200000);
  double operator()(double x) const;
  // Numerical inverse by bisection on the tabulated CDF.
  double quantile(double p) const;

 private:
  double lo_, h_;
  std::vector<double> cum_;
};

// Total-variation distance between the histogram of `draws` and the
// distribution with unnormalized log density `log_density`. Bins span the
// central range of the draws; mass outside it forms one extra bin on each
// side, with its reference mass integrated over a much wider window. With
// `log_scale` both draws and density are taken on the log axis (positive
// variables).
double tv_against_density(const std::vector<double>& draws,
                          const std::function<double(double)>& log_density,
                          bool log_scale = false, int bins = 40);

// Standard error of the mean of a correlated trace by non-overlapping batch
// means.
double batch_means_se(const std::vector<double>& trace, int batches = 50);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

// Densities written from their definitions.
double normal_logpdf(double x, double mean, double var);
double inv_gamma_logpdf(double x, double shape, double scale);
double beta_logpdf(double x, double a, double b);
// N(0, gamma nu) with nu ~ IG(a, b) integrated out (scaled Student t).
double slab_marginal_logpdf(double x, double gamma, double a, double b);

// Fully specified state without the data validation of initialize_state:
// mu = 0, A = B = 0, L = 0, sigma2 = 1, gamma = nu = 1, rho = 1/2, no active
// columns, kappa = a1 = a2 = 1, C = 0, tau = 1. Residuals are computed.
SamplerState toy_state(const Dataset& data, int P_max);

// Activates slot p with the given pivot and support, loadings set to
// `value` on the support.
void set_column(SamplerState& s, int p, int pivot, const std::vector<int>& rows,
                double value = 0.5);

// Redraws Y from the model given every latent quantity of `s`, keeping X:
// (I - B) Y_i = mu + A X_i + L C_i + E_i with E_iq ~ N(0, sigma2_q / tau_iq).
void regenerate_data(const SamplerState& s, Dataset& data, Rng& rng);

// Split/merge test states: data with one shared factor, random confounder
// values, fixed kappa, a1, a2 and row-dependent sigma2.
struct MovesToy {
  Dataset data;
  Hyperparameters hyper;  // resolved
  SamplerState state;
};
MovesToy moves_toy(int Q, int P_max, int n, std::uint64_t seed);
// set_column with loadings in (0.3, 0.7) and zeta in (0.2, 0.8).
void activate_column(MovesToy& t, int p, int pivot, const std::vector<int>& rows,
                     Rng& rng);
// Zeroes C on inactive slots and recomputes residuals.
void finish_toy(MovesToy& t);
// Random Q in [3, 6], P_max in [1, Q - 1] and fewer than P_max active
// columns on distinct random pivots, so a split is always legal.
MovesToy random_split_state(Rng& rng, std::uint64_t seed);

struct ConjugateCheck {
  std::string name;
  double tv;
};

// Single-site chains of each closed-form full conditional on 1-2 parameter
// toys against grid quadrature of the unnormalized posterior.
std::vector<ConjugateCheck> conjugate_checks(int draws, std::uint64_t seed);

// Metropolis-Hastings updates on toys: B entry (Q = 2) and (a1, a2).
std::vector<ConjugateCheck> metropolis_checks(int draws, std::uint64_t seed);

struct GirQuantity {
  std::string name;
  double mean = 0.0, se = 0.0, prior_mean = 0.0;
  double z() const { return (mean - prior_mean) / se; }
};

struct GirConfig {
  int sweeps = 100000;
  int burn_in = 1000;
  int n = 5;
  std::uint64_t seed = 1;
};

// Successive-conditional simulator on Q = 2, S = 1, P_max = 1 with
// finite-mean priors: alternate one full sweep with a fresh draw of the
// data given all latent quantities, and compare the averages of mu, sigma2,
// kappa, rho with their prior means. The prior on B is truncated to the
// stable set, which shifts the mean of rho_beta away from a_rho / (a_rho +
// b_rho); its reference value accounts for that.
std::vector<GirQuantity> getting_it_right(const GirConfig& config);
Hyperparameters gir_hyperparameters();

// Prior mean of rho_beta for Q = 2 once B is restricted to the stable set,
// by rejection sampling with standard-library generators.
double stable_rho_beta_prior_mean(const Hyperparameters& h, int draws,
                                  std::uint64_t seed);

// Tiny trans-dimensional model: Q = 3, P_max = 2, mu = 0, B = 0, no
// covariates, tau = 1 and kappa, a1, a2 held fixed. Only the loading
// structure, loadings, confounders, zeta and sigma2 move.
struct TinyModel {
  Dataset data;
  Hyperparameters hyper;  // resolved
  double kappa = 1.0, a1 = 0.6, a2 = 0.6;
};

// n observations from one confounder with children (0.9, 0.8, 0.7) and
// Gaussian errors of variance 0.3.
TinyModel tiny_model(int n, std::uint64_t seed);

// Posterior of p_star by enumerating every labelled structure (active slots,
// pivots, supports), integrating zeta and C analytically and (L, sigma2) by
// importance sampling around the Laplace approximation.
// `structures`, when given, receives the log weight of every structure
// keyed by structure_key.
std::vector<double> p_star_posterior_oracle(
    const TinyModel& model, int is_draws, std::uint64_t seed,
    std::map<std::string, double>* structures = nullptr);

// "pivot:rows" per active column in slot order, e.g. "0:012|2:2". Columns
// of a single-column state are keyed without their slot.
std::string structure_key(const SamplerState& state);

// Histogram of p_star along a chain restricted to the moving blocks above.
std::vector<double> p_star_chain(const TinyModel& model, int sweeps,
                                 int burn_in, std::uint64_t seed,
                                 std::map<std::string, double>* structures = nullptr,
                                 const MoveConfig& moves = MoveConfig{});

}  // namespace baycausal::oracle

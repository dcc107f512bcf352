#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "baycausal/distributions.hpp"
#include "oracles.hpp"

using namespace baycausal;
namespace orc = baycausal::oracle;

namespace {

std::vector<double> draws_of(int n, auto&& f) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = f();
  return out;
}

double standard_error(const std::vector<double>& x) {
  return std::sqrt(orc::variance(x) / static_cast<double>(x.size()));
}

double empirical_quantile(std::vector<double> x, double p) {
  const auto k = static_cast<std::size_t>(p * static_cast<double>(x.size() - 1));
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
  return x[k];
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("inverse gamma mean with shape 2 and scale 1") {
  Rng rng(11);
  const auto x = draws_of(1000000, [&] { return draw_inverse_gamma(2.0, 1.0, rng); });
  // The variance is infinite at shape 2, so the mean gets a loose check and
  // the standard-error check runs on 1/x ~ Gamma(2, rate 1).
  CHECK(std::abs(orc::mean(x) - 1.0) < 0.03);
  std::vector<double> recip;
  for (double v : x) recip.push_back(1.0 / v);
  // 1/x ~ Gamma(2, rate 1): mean 2, variance 2
  CHECK(std::abs(orc::mean(recip) - 2.0) < 3.0 * std::sqrt(2.0 / 1e6));
}

TEST_CASE("reciprocal of inverse gamma(1, 1/8) is exponential with rate 1/8") {
  Rng rng(12);
  const auto x = draws_of(200000, [&] { return 1.0 / draw_inverse_gamma(1.0, 0.125, rng); });
  const double d = orc::ks_statistic(x, [](double y) { return y <= 0 ? 0.0 : 1.0 - std::exp(-y / 8.0); });
  CHECK(d < orc::ks_critical(x.size()));
}

TEST_CASE("inverse gamma quantiles agree with a numerically inverted CDF") {
  Rng rng(13);
  const auto x = draws_of(400000, [&] { return draw_inverse_gamma(3.0, 2.0, rng); });
  const orc::NumericCdf cdf([](double v) { return orc::inv_gamma_logpdf(v, 3.0, 2.0); }, 1e-4, 200.0);
  for (double p : {0.1, 0.5, 0.9}) {
    const double q = cdf.quantile(p);
    const double dens = std::exp(orc::inv_gamma_logpdf(q, 3.0, 2.0));
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(x.size())) / dens;
    CHECK(std::abs(empirical_quantile(x, p) - q) < 4.0 * se);
  }
}

TEST_CASE("inverse Gaussian moments with mean 1 and shape 1/4") {
  Rng rng(14);
  const auto x = draws_of(1000000, [&] { return draw_inverse_gaussian(1.0, 0.25, rng); });
  CHECK(std::abs(orc::mean(x) - 1.0) < 3.0 * standard_error(x));
  // fourth central moment is 63 sigma^4 for excess kurtosis 15 mean / shape
  const double se_var = std::sqrt((63.0 - 1.0) * 16.0 / 1e6);
  CHECK(std::abs(orc::variance(x) - 4.0) < 4.0 * se_var);
}

TEST_CASE("inverse Gaussian(2, 10) passes KS against its integrated density") {
  Rng rng(15);
  const auto x = draws_of(200000, [&] { return draw_inverse_gaussian(2.0, 10.0, rng); });
  auto logpdf = [](double v) {
    return 0.5 * std::log(10.0 / (2 * std::numbers::pi * v * v * v)) - 10.0 * (v - 2) * (v - 2) / (2 * 4.0 * v);
  };
  const orc::NumericCdf cdf(logpdf, 1e-3, 30.0);
  CHECK(orc::ks_statistic(x, cdf) < orc::ks_critical(x.size()));
}

TEST_CASE("inverse Gaussian concentrates at its mean as the shape grows") {
  Rng rng(16);
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(draw_inverse_gaussian(3.0, 1e12, rng) - 3.0) < 1e-4);
}

TEST_CASE("samplers reject non-positive parameters") {
  Rng rng(1);
  CHECK_THROWS_AS(draw_inverse_gamma(0.0, 1.0, rng), std::domain_error);
  CHECK_THROWS_AS(draw_inverse_gamma(1.0, -1.0, rng), std::domain_error);
  CHECK_THROWS_AS(draw_inverse_gaussian(-1.0, 1.0, rng), std::domain_error);
  CHECK_THROWS_AS(draw_inverse_gaussian(1.0, 0.0, rng), std::domain_error);
  CHECK_THROWS_AS(draw_gamma(1.0, 0.0, rng), std::domain_error);
}

TEST_CASE("Laplace mixture variance, kurtosis and CDF") {
  Rng rng(17);
  const double s2 = 1.0 / 16.0;
  const auto e = draws_of(1000000, [&] { return draw_laplace_via_mixture(s2, rng).e; });
  // Laplace fourth moment 6 var^2 so Var(sample variance) = 5 var^2 / n
  const double var = orc::variance(e);
  CHECK(std::abs(var - 0.5) < 3.0 * std::sqrt(5.0) * 0.5 / 1000.0);
  double m4 = 0.0;
  const double mu = orc::mean(e);
  for (double v : e) m4 += std::pow(v - mu, 4);
  m4 /= static_cast<double>(e.size());
  CHECK(std::abs(m4 / (var * var) - 3.0 - 3.0) < 0.25);
  const double b = 2.0 * std::sqrt(s2);
  auto cdf = [b](double x) { return x < 0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b); };
  std::vector<double> sub(e.begin(), e.begin() + 200000);
  CHECK(orc::ks_statistic(sub, cdf) < orc::ks_critical(sub.size()));
}

TEST_CASE("spike and slab log odds") {
  const double nu0 = 2.5e-4;
  CHECK(spike_slab_log_odds(0.0, 1.0, nu0, 0.3) ==
        doctest::Approx(std::log(std::sqrt(nu0) * 0.3 / 0.7)).epsilon(1e-12));
  CHECK(spike_slab_log_odds(0.5, 1.0, nu0, 0.5) ==
        doctest::Approx(std::log(std::sqrt(nu0)) + 0.125 * (1.0 / nu0 - 1.0)).epsilon(1e-12));
  CHECK(spike_slab_log_odds(0.5, 1.0, nu0, 0.5) ==
        doctest::Approx(std::log(0.015811) + 499.875).epsilon(1e-6));
  CHECK(spike_slab_log_odds(0.37, 2.0, nu0, 0.2) == spike_slab_log_odds(-0.37, 2.0, nu0, 0.2));
  CHECK(spike_slab_log_odds(0.1, 1.0, nu0, 0.0) == -kInf);
  CHECK(spike_slab_log_odds(0.1, 1.0, nu0, 1.0) == kInf);
}

TEST_CASE("substreams are reproducible and distinct") {
  const Rng root(99);
  Rng a = root.substream({3, 7}), b = root.substream({3, 7}), c = root.substream({7, 3});
  for (int i = 0; i < 100; ++i) {
    const auto va = a(), vb = b(), vc = c();
    CHECK(va == vb);
    CHECK(va != vc);
  }
  CHECK(derive_seed(5, {1, 2}) == derive_seed(5, {1, 2}));
  CHECK(derive_seed(5, {1, 2}) != derive_seed(5, {2, 1}));
}

}

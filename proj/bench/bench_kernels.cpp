// Serial reference kernels against their OpenMP versions on Scenario II
// sized data. Set OMP_NUM_THREADS to vary the thread count.
#include <benchmark/benchmark.h>

#include "baycausal/kernels.hpp"
#include "baycausal/rng.hpp"

using namespace baycausal;

namespace {

struct Fixture {
  Dataset data;
  CausalParameters params;
  Matrix C, tau, resid;
  std::vector<int> active{0, 1};

  explicit Fixture(int n) {
    Rng rng(1);
    params = scenario_two();
    data = generate_data(params, n, covariates::StandardNormal{}, rng).data;
    C = Matrix::Zero(n, params.L.cols());
    for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = rng.normal();
    tau = Matrix::Ones(n, data.Q());
    kernels::serial::residuals(data, params, C, resid);
  }
};

const Fixture& fixture(int n) {
  static Fixture small(1000), large(20000);
  return n <= 1000 ? small : large;
}

template <bool Parallel>
void BM_residuals(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  Matrix out;
  for (auto _ : st) {
    if (Parallel) kernels::omp::residuals(f.data, f.params, f.C, out);
    else kernels::serial::residuals(f.data, f.params, f.C, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_draw_tau(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  Matrix tau = f.tau;
  std::uint64_t seed = 0;
  for (auto _ : st) {
    if (Parallel) kernels::omp::draw_tau(f.resid, f.params.sigma2, 1e-8, ++seed, tau);
    else kernels::serial::draw_tau(f.resid, f.params.sigma2, 1e-8, ++seed, tau);
    benchmark::DoNotOptimize(tau.data());
  }
}

template <bool Parallel>
void BM_draw_confounders(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  Matrix C = f.C, resid = f.resid;
  const kernels::ConfounderInputs in{f.params.L, f.active, f.params.sigma2, f.tau};
  std::uint64_t seed = 0;
  for (auto _ : st) {
    if (Parallel) kernels::omp::draw_confounders(in, ++seed, C, resid);
    else kernels::serial::draw_confounders(in, ++seed, C, resid);
    benchmark::DoNotOptimize(C.data());
  }
}

}  // namespace

BENCHMARK(BM_residuals<false>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_residuals<true>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_draw_tau<false>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_draw_tau<true>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_draw_confounders<false>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_draw_confounders<true>)->Arg(1000)->Arg(20000);

BENCHMARK_MAIN();

#pragma once

#include <cstdint>
#include <vector>

#include "baycausal/graph_model.hpp"

// Observation-indexed inner loops of a sweep. Each kernel has a serial
// reference and an OpenMP version; both use one RNG substream per
// observation and fixed-order reductions, so their outputs are bitwise
// identical for any thread count.
namespace baycausal::kernels {

struct ConfounderInputs {
  const Matrix& L;                 // Q x P_max
  const std::vector<int>& active;  // active slots
  const Vector& sigma2;
  const Matrix& tau;               // n x Q
};

namespace serial {

// out = Y - 1 mu^T - X A^T - Y B^T - C L^T
void residuals(const Dataset& data, const CausalParameters& params,
               const Matrix& C, Matrix& out);

// tau(i, q) ~ InverseGaussian(sigma_q / (2 max(|r|, floor)), 1/4)
void draw_tau(const Matrix& resid, const Vector& sigma2, double floor,
              std::uint64_t seed, Matrix& tau);

// Redraws C(i, active) from its Gaussian full conditional and keeps resid
// consistent with the new values.
void draw_confounders(const ConfounderInputs& in, std::uint64_t seed,
                      Matrix& C, Matrix& resid);

}  // namespace serial

namespace omp {

void residuals(const Dataset& data, const CausalParameters& params,
               const Matrix& C, Matrix& out);
void draw_tau(const Matrix& resid, const Vector& sigma2, double floor,
              std::uint64_t seed, Matrix& tau);
void draw_confounders(const ConfounderInputs& in, std::uint64_t seed,
                      Matrix& C, Matrix& resid);

}  // namespace omp

int max_threads();

}  // namespace baycausal::kernels

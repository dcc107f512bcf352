#include "baycausal/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "baycausal/distributions.hpp"

namespace baycausal::kernels {

namespace {

inline void residual_row(const Dataset& data, const CausalParameters& params,
                         const Matrix& C, Eigen::Index i, Matrix& out) {
  const Eigen::Index Q = data.Y.cols(), S = data.X.cols(), P = C.cols();
  for (Eigen::Index q = 0; q < Q; ++q) {
    double v = data.Y(i, q) - params.mu(q);
    for (Eigen::Index s = 0; s < S; ++s) v -= params.A(q, s) * data.X(i, s);
    for (Eigen::Index k = 0; k < Q; ++k) v -= params.B(q, k) * data.Y(i, k);
    for (Eigen::Index p = 0; p < P; ++p) v -= params.L(q, p) * C(i, p);
    out(i, q) = v;
  }
}

inline void tau_row(const Matrix& resid, const Vector& sigma2, double floor,
                    std::uint64_t seed, Eigen::Index i, Matrix& tau) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
  for (Eigen::Index q = 0; q < resid.cols(); ++q) {
    const double r = std::max(std::abs(resid(i, q)), floor);
    tau(i, q) = draw_inverse_gaussian(std::sqrt(sigma2(q)) / (2.0 * r), 0.25, rng);
  }
}

// Workspace types bounded at compile time so small rows avoid the heap.
constexpr int kSmallK = 8;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kSmallK, kSmallK>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kSmallK, 1>;

template <class Mat, class Vec>
void confounder_row_impl(const ConfounderInputs& in, std::uint64_t seed,
                         Eigen::Index i, Matrix& C, Matrix& resid) {
  const auto K = static_cast<Eigen::Index>(in.active.size());
  const Eigen::Index Q = in.L.rows();
  Mat M = Mat::Identity(K, K);
  Vec b = Vec::Zero(K);
  Vec la(K);
  for (Eigen::Index q = 0; q < Q; ++q) {
    double v = resid(i, q);
    for (Eigen::Index k = 0; k < K; ++k) {
      const int p = in.active[static_cast<std::size_t>(k)];
      la(k) = in.L(q, p);
      v += la(k) * C(i, p);
    }
    // Keep e = r + L C in resid until the draw is known.
    resid(i, q) = v;
    const double w = in.tau(i, q) / in.sigma2(q);
    for (Eigen::Index a = 0; a < K; ++a) {
      if (la(a) == 0.0) continue;
      b(a) += w * la(a) * v;
      for (Eigen::Index c = 0; c < K; ++c) M(a, c) += w * la(a) * la(c);
    }
  }
  Eigen::LLT<Mat> llt(M);
  Vec mean = llt.solve(b);
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
  Vec z(K);
  for (Eigen::Index k = 0; k < K; ++k) z(k) = rng.normal();
  Vec draw = mean + llt.matrixU().solve(z);
  for (Eigen::Index k = 0; k < K; ++k) {
    C(i, in.active[static_cast<std::size_t>(k)]) = draw(k);
  }
  for (Eigen::Index q = 0; q < Q; ++q) {
    double v = resid(i, q);
    for (Eigen::Index k = 0; k < K; ++k) {
      v -= in.L(q, in.active[static_cast<std::size_t>(k)]) * draw(k);
    }
    resid(i, q) = v;
  }
}

inline void confounder_row(const ConfounderInputs& in, std::uint64_t seed,
                           Eigen::Index i, Matrix& C, Matrix& resid) {
  if (in.active.size() <= static_cast<std::size_t>(kSmallK)) {
    confounder_row_impl<SmallMatrix, SmallVector>(in, seed, i, C, resid);
  } else {
    confounder_row_impl<Matrix, Vector>(in, seed, i, C, resid);
  }
}

}  // namespace

namespace serial {

void residuals(const Dataset& data, const CausalParameters& params,
               const Matrix& C, Matrix& out) {
  out.resize(data.Y.rows(), data.Y.cols());
  for (Eigen::Index i = 0; i < data.Y.rows(); ++i) {
    residual_row(data, params, C, i, out);
  }
}

void draw_tau(const Matrix& resid, const Vector& sigma2, double floor,
              std::uint64_t seed, Matrix& tau) {
  for (Eigen::Index i = 0; i < resid.rows(); ++i) {
    tau_row(resid, sigma2, floor, seed, i, tau);
  }
}

void draw_confounders(const ConfounderInputs& in, std::uint64_t seed,
                      Matrix& C, Matrix& resid) {
  if (in.active.empty()) return;
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    confounder_row(in, seed, i, C, resid);
  }
}

}  // namespace serial

namespace omp {

void residuals(const Dataset& data, const CausalParameters& params,
               const Matrix& C, Matrix& out) {
  out.resize(data.Y.rows(), data.Y.cols());
  const Eigen::Index n = data.Y.rows();
#pragma omp parallel for schedule(static) if (n > 256)
  for (Eigen::Index i = 0; i < n; ++i) {
    residual_row(data, params, C, i, out);
  }
}

void draw_tau(const Matrix& resid, const Vector& sigma2, double floor,
              std::uint64_t seed, Matrix& tau) {
  const Eigen::Index n = resid.rows();
#pragma omp parallel for schedule(static) if (n > 256)
  for (Eigen::Index i = 0; i < n; ++i) {
    tau_row(resid, sigma2, floor, seed, i, tau);
  }
}

void draw_confounders(const ConfounderInputs& in, std::uint64_t seed,
                      Matrix& C, Matrix& resid) {
  if (in.active.empty()) return;
  const Eigen::Index n = C.rows();
#pragma omp parallel for schedule(static) if (n > 256)
  for (Eigen::Index i = 0; i < n; ++i) {
    confounder_row(in, seed, i, C, resid);
  }
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace baycausal::kernels

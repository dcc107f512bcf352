#include "baycausal/graph_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>
#include <sstream>

#include "baycausal/distributions.hpp"

namespace baycausal {

double spectral_radius(const Matrix& B) {
  if (B.rows() != B.cols()) {
    throw DimensionError("spectral_radius: matrix must be square");
  }
  if (B.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(B, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_radius: eigenvalue iteration failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool check_stability(const Matrix& B, double margin) {
  return spectral_radius(B) < 1.0 - margin;
}

double log_abs_det_i_minus(const Matrix& B) {
  const Eigen::Index Q = B.rows();
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(Q, Q) - B);
  const Matrix& m = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < Q; ++i) {
    const double d = std::abs(m(i, i));
    if (d == 0.0) throw NumericalError("I - B is singular");
    acc += std::log(d);
  }
  return acc;
}

UgltResult check_uglt(const Matrix& L, double tol) {
  UgltResult out;
  std::set<int> seen;
  for (Eigen::Index p = 0; p < L.cols(); ++p) {
    for (Eigen::Index q = 0; q < L.rows(); ++q) {
      if (std::abs(L(q, p)) > tol) {
        const int pivot = static_cast<int>(q);
        if (!seen.insert(pivot).second) out.ok = false;
        out.pivots.push_back(pivot);
        break;
      }
    }
  }
  return out;
}

std::optional<std::string> canonical_form_violation(const Support& l_support) {
  std::vector<Eigen::Index> nonempty;
  for (Eigen::Index p = 0; p < l_support.cols(); ++p) {
    const auto children = l_support.col(p).count();
    if (children == 0) continue;
    if (children < 2) {
      std::ostringstream os;
      os << "confounder column " << p + 1 << " has a single child";
      return os.str();
    }
    nonempty.push_back(p);
  }
  for (std::size_t a = 0; a < nonempty.size(); ++a) {
    for (std::size_t b = a + 1; b < nonempty.size(); ++b) {
      if ((l_support.col(nonempty[a]) == l_support.col(nonempty[b])).all()) {
        std::ostringstream os;
        os << "confounder columns " << nonempty[a] + 1 << " and "
           << nonempty[b] + 1 << " share the same children";
        return os.str();
      }
    }
  }
  return std::nullopt;
}

Support support_of(const Matrix& M, double tol) {
  return (M.array().abs() > tol);
}

GroundTruthGraph ground_truth_of(const CausalParameters& params) {
  GroundTruthGraph g;
  g.params = params;
  g.b_support = support_of(params.B);
  g.b_support.matrix().diagonal().setConstant(false);
  g.a_support = support_of(params.A);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index p = 0; p < params.L.cols(); ++p) {
    if ((params.L.col(p).array().abs() > kPivotTolerance).any()) {
      cols.push_back(p);
    }
  }
  g.p_star = static_cast<int>(cols.size());
  g.l_support.resize(params.L.rows(), g.p_star);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    g.l_support.col(static_cast<Eigen::Index>(k)) =
        params.L.col(cols[k]).array().abs() > kPivotTolerance;
  }
  return g;
}

void validate_parameters(const CausalParameters& params) {
  const int Q = params.Q();
  if (params.B.rows() != Q || params.B.cols() != Q) {
    throw DimensionError("B must be Q x Q");
  }
  if (params.A.rows() != Q) throw DimensionError("A must have Q rows");
  if (params.L.rows() != Q) throw DimensionError("L must have Q rows");
  if (params.sigma2.size() != Q) throw DimensionError("sigma2 must have length Q");
  if ((params.sigma2.array() <= 0.0).any()) {
    throw ValidationError("sigma2 must be strictly positive");
  }
  if ((params.B.diagonal().array() != 0.0).any()) {
    throw ValidationError("B must have a zero diagonal (no self-loops)");
  }
  const double radius = spectral_radius(params.B);
  if (!(radius < 1.0 - kStabilityMargin)) {
    std::ostringstream os;
    os << "B is not stable: spectral radius " << radius << " >= 1";
    throw StabilityError(os.str(), radius);
  }
  if (!check_uglt(params.L).ok) {
    throw ValidationError("L violates UGLT: pivot rows are not distinct");
  }
  if (auto why = canonical_form_violation(support_of(params.L))) {
    throw ValidationError("L is not in canonical form: " + *why);
  }
}

namespace {

Matrix draw_covariates(const CovariateSpec& spec, int n, int S, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> Matrix {
        using T = std::decay_t<decltype(s)>;
        Matrix X(n, S);
        if constexpr (std::is_same_v<T, covariates::StandardNormal>) {
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < S; ++j) X(i, j) = rng.normal();
        } else if constexpr (std::is_same_v<T, covariates::Bernoulli>) {
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < S; ++j) X(i, j) = rng.uniform() < s.p ? 1.0 : 0.0;
        } else {
          if (s.X.rows() != n || s.X.cols() != S) {
            throw DimensionError("supplied covariates must be n x S");
          }
          X = s.X;
        }
        return X;
      },
      spec);
}

}  // namespace

SimulatedData generate_data(const CausalParameters& params, int n,
                            const CovariateSpec& covariate_spec, Rng& rng) {
  validate_parameters(params);
  if (n < 1) throw ValidationError("n must be at least 1");
  const int Q = params.Q(), S = params.S(), P = params.P();

  SimulatedData out;
  out.data.X = draw_covariates(covariate_spec, n, S, rng);
  out.C.resize(n, P);
  out.E.resize(n, Q);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < P; ++p) out.C(i, p) = rng.normal();
    for (int q = 0; q < Q; ++q) {
      out.E(i, q) = draw_laplace_via_mixture(params.sigma2(q), rng).e;
    }
  }

  // rhs rows are observations; solve (I - B) y_i = rhs_i for all i at once.
  Matrix rhs = out.E + out.C * params.L.transpose() +
               out.data.X * params.A.transpose();
  rhs.rowwise() += params.mu.transpose();
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(Q, Q) - params.B);
  if (std::abs(lu.determinant()) < 1e-300) {
    throw NumericalError("I - B is singular");
  }
  out.data.Y = lu.solve(rhs.transpose()).transpose();
  out.truth = ground_truth_of(params);
  return out;
}

CausalParameters scenario_one() {
  const int Q = 5;
  CausalParameters p;
  p.mu.resize(Q);
  p.mu << 0.79, -0.47, -0.26, 0.15, 0.82;
  p.A.resize(Q, 2);
  p.A.col(0) << -0.60, 0.80, 0.89, 0.32, 0.26;
  p.A.col(1) << -0.88, -0.59, -0.65, 0.37, -0.23;
  p.B = Matrix::Zero(Q, Q);
  p.B(0, 1) = 0.5;   // Y2 -> Y1
  p.B(2, 3) = 0.4;   // Y4 -> Y3
  p.B(2, 4) = -0.7;  // Y5 -> Y3
  p.B(3, 0) = 0.3;   // Y1 -> Y4
  p.L = Matrix::Zero(Q, 2);
  p.L(1, 0) = 0.5;
  p.L(2, 0) = 0.3;
  p.L(3, 1) = -0.5;
  p.L(4, 1) = 0.4;
  p.sigma2 = Vector::Constant(Q, 1.0 / 16.0);
  return p;
}

CausalParameters scenario_two() {
  const int Q = 7;
  CausalParameters p;
  p.mu.resize(Q);
  p.mu << 0.79, -0.47, -0.26, 0.15, 0.82, -0.60, 0.80;
  p.A.resize(Q, 2);
  p.A.col(0) << 0.89, 0.32, 0.26, -0.88, -0.59, -0.65, 0.37;
  p.A.col(1) << -0.23, 0.54, 0.0, 0.44, 0.98, -0.24, 0.55;
  p.B = Matrix::Zero(Q, Q);
  // Cycle Y1 -> Y4 -> Y2 -> Y1.
  p.B(0, 1) = 0.5;
  p.B(1, 3) = -0.4;
  p.B(3, 0) = 0.3;
  // Cycle Y3 -> Y5 -> Y7 -> Y3.
  p.B(4, 2) = -0.7;
  p.B(6, 4) = 0.9;
  p.B(2, 6) = 0.6;
  // Y6 -> Y4, Y7 -> Y6.
  p.B(3, 5) = 0.5;
  p.B(5, 6) = 0.4;
  p.L = Matrix::Zero(Q, 2);
  p.L(1, 0) = 0.4;
  p.L(2, 0) = 0.5;
  p.L(3, 1) = -0.5;
  p.L(4, 1) = 0.4;
  p.L(5, 1) = 0.3;
  p.sigma2 = Vector::Constant(Q, 1.0 / 16.0);
  return p;
}

}  // namespace baycausal

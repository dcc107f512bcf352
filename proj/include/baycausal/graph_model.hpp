#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "baycausal/rng.hpp"
#include "baycausal/types.hpp"

namespace baycausal {

// Linear structural causal model  Y = mu + B Y + A X + L C + E.
// B[q, q'] != 0 encodes the edge Y_q' -> Y_q.
struct CausalParameters {
  Vector mu;      // Q
  Matrix A;       // Q x S
  Matrix B;       // Q x Q, zero diagonal
  Matrix L;       // Q x P
  Vector sigma2;  // Q; Var(E_q) = 8 sigma2_q

  int Q() const { return static_cast<int>(mu.size()); }
  int S() const { return static_cast<int>(A.cols()); }
  int P() const { return static_cast<int>(L.cols()); }
};

struct Dataset {
  Matrix Y;  // n x Q
  Matrix X;  // n x S, S may be 0

  int n() const { return static_cast<int>(Y.rows()); }
  int Q() const { return static_cast<int>(Y.cols()); }
  int S() const { return static_cast<int>(X.cols()); }
};

struct GroundTruthGraph {
  Support b_support;
  Support a_support;
  Support l_support;  // Q x p_star
  int p_star = 0;
  CausalParameters params;
};

inline constexpr double kStabilityMargin = 1e-9;
inline constexpr double kPivotTolerance = 1e-12;

double spectral_radius(const Matrix& B);

// spectral_radius(B) < 1 - margin.
bool check_stability(const Matrix& B, double margin = kStabilityMargin);

// log |det(I - B)|; throws NumericalError when I - B is singular.
double log_abs_det_i_minus(const Matrix& B);

struct UgltResult {
  bool ok = true;
  std::vector<int> pivots;  // one per non-zero column, 0-based rows
};

UgltResult check_uglt(const Matrix& L, double tol = kPivotTolerance);

// Every non-empty column has >= 2 children and no two columns share a child
// set. Returns an explanation of the first violation, if any.
std::optional<std::string> canonical_form_violation(const Support& l_support);

Support support_of(const Matrix& M, double tol = kPivotTolerance);

// Truth graph implied by a parameter set (zero columns of L are dropped).
GroundTruthGraph ground_truth_of(const CausalParameters& params);

// Throws ValidationError / StabilityError when params break the model's
// structural assumptions.
void validate_parameters(const CausalParameters& params);

namespace covariates {
struct StandardNormal {};
struct Bernoulli {
  double p = 0.5;
};
struct Fixed {
  Matrix X;  // n x S
};
}  // namespace covariates

using CovariateSpec = std::variant<covariates::StandardNormal,
                                   covariates::Bernoulli, covariates::Fixed>;

struct SimulatedData {
  Dataset data;
  GroundTruthGraph truth;
  Matrix C;  // n x P drawn confounders
  Matrix E;  // n x Q drawn Laplace errors
};

// Draws n observations. Errors are Laplace with scale 2 sqrt(sigma2_q),
// confounders N(0, I); Y solves (I - B) Y = mu + A X + L C + E by LU.
SimulatedData generate_data(const CausalParameters& params, int n,
                            const CovariateSpec& covariate_spec, Rng& rng);

// Parameter sets of the two benchmark simulation scenarios.
CausalParameters scenario_one();
CausalParameters scenario_two();

}  // namespace baycausal

#pragma once

#include "dlnlp/lp_core.hpp"

#include <cstdint>
#include <vector>

namespace dlnlp {

// min sum_i x_i log(x_i / alpha_i^2) - x_i  s.t.  Ax = b, x >= 0.
// alpha enters only through log(alpha^2), stored directly so cost-scaled
// references (log alpha_i^2 = -c_i / lambda) stay representable for tiny lambda.
class EntropyRegularizedLp {
 public:
  static EntropyRegularizedLp from_alpha(LinearProgram lp, const Vector& alpha);
  // alpha_i = exp(-c_i / (2 lambda)): the minimizer of c'x + lambda sum(x log x - x).
  static EntropyRegularizedLp from_lambda(LinearProgram lp, double lambda);

  const LinearProgram& lp() const noexcept { return lp_; }
  const Vector& log_alpha_sq() const noexcept { return log_alpha_sq_; }
  Vector alpha() const { return (0.5 * log_alpha_sq_.array()).exp().matrix(); }

  double objective(const Vector& x) const;

 private:
  EntropyRegularizedLp(LinearProgram lp, Vector log_alpha_sq);

  LinearProgram lp_;
  Vector log_alpha_sq_;
};

struct DualSolution {
  Vector nu;
  Vector x;  // alpha^2 o exp(A'nu)
  double kkt_residual = 0.0;
  long newton_iters = 0;
  std::vector<double> dual_values;  // D(nu) after each accepted step, starting at nu = 0
};

// Damped Newton on D(nu) = sum_i alpha_i^2 exp((A'nu)_i) - b'nu with
// halving backtracking (Armijo 1e-4); stops once |Ax(nu) - b|_2 <= tol.
DualSolution solve_entropy_lp(const EntropyRegularizedLp& prob, double tol = 1e-12, long max_newton_iters = 500);

struct VertexSolution {
  Vector x_star;
  double value = 0.0;
  std::vector<Index> basis;    // column indices of the optimal basis
  std::vector<Index> support;  // nonzero coordinates of x_star
  long basic_feasible_count = 0;
};

struct VertexOptions {
  Index max_columns = 24;
  std::uint64_t max_subsets = 1'000'000;
  double feasibility_tol = 1e-10;  // relative to max(1, |b|_inf)
};

std::uint64_t binomial(Index n, Index k);

// Enumerates every basic feasible solution of {Ax = b, x >= 0}; the LP
// optimum is the cheapest, ties resolved toward the lexicographically
// smallest support.
VertexSolution lp_vertex_oracle(const LinearProgram& lp, const VertexOptions& options = {});
// Same enumeration for costs of either sign (used for general-form LPs).
VertexSolution vertex_minimize(const Matrix& a, const Vector& b, const Vector& c, const VertexOptions& options = {});
std::vector<Vector> basic_feasible_solutions(const Matrix& a, const Vector& b, const VertexOptions& options = {});

struct PaperConstants {
  double r_squared = 0.0;
  double eta_bar = 0.0;
  long submatrix_count = 0;  // invertible m x m column submatrices examined
  double max_inverse_norm = 0.0;
  double op_norm = 0.0;  // ||A||_2
  bool heuristic = false;  // true when submatrices were sampled, not enumerated
};

struct ConstantsOptions {
  bool allow_heuristic = false;
  long samples = 20000;
  std::uint64_t seed = 1;
  Index max_columns = 24;
  std::uint64_t max_subsets = 1'000'000;
};

// R^2 = sqrt(n) max_I |A_I^{-1}|_2 (|r0|_2 + |b|_2) + e n |u0|_2^2 over
// invertible column submatrices A_I, and the stepsize
// eta_bar = min{ 1 / (4|A|(|A| R^2 + |b|)), 1 / (5 L max(R^2, 1)) }
// below which every iterate inside the radius-R ball meets the
// per-iteration stepsize bound.
PaperConstants compute_constants(const LinearProgram& lp, const Vector& u0, const ConstantsOptions& options = {});

}  // namespace dlnlp

#include "dlnlp/oracles.hpp"

#include "combinations.hpp"
#include "dlnlp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace dlnlp {

EntropyRegularizedLp::EntropyRegularizedLp(LinearProgram lp, Vector log_alpha_sq)
    : lp_(std::move(lp)), log_alpha_sq_(std::move(log_alpha_sq)) {
  if (log_alpha_sq_.size() != lp_.cols()) throw Error(ErrorCode::kDimensionMismatch, "alpha must have n entries");
  if (!log_alpha_sq_.allFinite()) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive and finite");
}

EntropyRegularizedLp EntropyRegularizedLp::from_alpha(LinearProgram lp, const Vector& alpha) {
  if (alpha.size() != lp.cols()) throw Error(ErrorCode::kDimensionMismatch, "alpha must have n entries");
  if (!(alpha.minCoeff() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be strictly positive");
  Vector log_sq = 2.0 * alpha.array().log().matrix();
  return EntropyRegularizedLp(std::move(lp), std::move(log_sq));
}

EntropyRegularizedLp EntropyRegularizedLp::from_lambda(LinearProgram lp, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  Vector log_sq = -lp.c() / lambda;
  return EntropyRegularizedLp(std::move(lp), std::move(log_sq));
}

double EntropyRegularizedLp::objective(const Vector& x) const {
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0) return std::numeric_limits<double>::infinity();
    if (x(i) > 0.0) total += x(i) * (std::log(x(i)) - log_alpha_sq_(i)) - x(i);
  }
  return total;
}

namespace {
constexpr double kMaxLogStep = 20.0;
}

DualSolution solve_entropy_lp(const EntropyRegularizedLp& prob, double tol, long max_newton_iters) {
  const Matrix& a = prob.lp().a();
  const Vector& b = prob.lp().b();
  const Vector& log_alpha_sq = prob.log_alpha_sq();
  const Index m = a.rows();

  Eigen::ColPivHouseholderQR<Matrix> qr(a.transpose());
  qr.setThreshold(1e-12);
  if (qr.rank() < m) {
    throw Error(ErrorCode::kSingularHessian,
                fmt::format("A has rank {} < m={}; the dual Hessian is singular", qr.rank(), m));
  }

  DualSolution sol;
  sol.nu = Vector::Zero(m);
  Vector z = log_alpha_sq;
  sol.x = z.array().exp().matrix();
  auto dual_value = [&](const Vector& nu, const Vector& x) { return x.sum() - b.dot(nu); };
  double value = dual_value(sol.nu, sol.x);
  sol.dual_values.push_back(value);

  for (;;) {
    const Vector grad = a * sol.x - b;
    sol.kkt_residual = grad.norm();
    if (sol.kkt_residual <= tol) return sol;
    if (sol.newton_iters >= max_newton_iters) {
      throw Error(ErrorCode::kNoConvergence,
                  fmt::format("dual Newton stopped after {} iterations with residual {:g}", sol.newton_iters,
                              sol.kkt_residual));
    }
    const Matrix hessian = a * sol.x.asDiagonal() * a.transpose();
    Eigen::LLT<Matrix> llt(hessian);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularHessian, "dual Hessian is not positive definite");
    const Vector dir = -llt.solve(grad);
    const double slope = grad.dot(dir);
    const Vector atd = a.transpose() * dir;

    // Round-off allowance for comparing D values that agree to machine precision.
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() * (sol.x.sum() + std::abs(b.dot(sol.nu)));
    // Far from the optimum the Newton step can move log x by hundreds; cap the
    // first trial so exp() stays representable.
    const double max_log_change = atd.lpNorm<Eigen::Infinity>();
    double step = max_log_change > kMaxLogStep ? kMaxLogStep / max_log_change : 1.0;
    bool accepted = false;
    Vector trial_x;
    for (int halvings = 0; halvings < 200; ++halvings, step *= 0.5) {
      trial_x = (z + step * atd).array().exp().matrix();
      if (!trial_x.allFinite()) continue;
      const double trial = dual_value(sol.nu + step * dir, trial_x);
      if (trial <= value + 1e-4 * step * slope + noise) {
        // A trial that only ties within round-off must still shrink the residual.
        if (trial > value + 1e-4 * step * slope && (a * trial_x - b).norm() >= sol.kkt_residual) continue;
        value = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::kNoConvergence,
                  fmt::format("line search failed at residual {:g}", sol.kkt_residual));
    }
    sol.nu += step * dir;
    z += step * atd;
    sol.x = std::move(trial_x);
    sol.dual_values.push_back(value);
    ++sol.newton_iters;
  }
}

std::uint64_t binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (Index i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

void check_enumeration_size(Index m, Index n, Index max_columns, std::uint64_t max_subsets) {
  if (n > max_columns || binomial(n, m) > max_subsets) {
    throw Error(ErrorCode::kTooLarge, fmt::format("C({}, {}) = {} subsets exceeds the enumeration cap (n <= {}, {} subsets)",
                                                  n, m, binomial(n, m), max_columns, max_subsets));
  }
}

// Calls visit(basis, x) for every basic feasible solution.
template <class Fn>
long for_each_bfs(const Matrix& a, const Vector& b, const VertexOptions& options, Fn&& visit) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (b.size() != m) throw Error(ErrorCode::kDimensionMismatch, "b must have m entries");
  check_enumeration_size(m, n, options.max_columns, options.max_subsets);
  const double zero_tol = options.feasibility_tol * std::max(1.0, b.lpNorm<Eigen::Infinity>());
  long count = 0;
  detail::for_each_combination(n, m, [&](const std::vector<Index>& cols) {
    const Matrix basis = detail::select_columns(a, cols);
    Eigen::FullPivLU<Matrix> lu(basis);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) return true;
    const Vector xb = lu.solve(b);
    if (xb.minCoeff() < -zero_tol) return true;
    Vector x = Vector::Zero(n);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = xb(static_cast<Index>(j));
      x(cols[j]) = v > zero_tol ? v : 0.0;
    }
    ++count;
    visit(cols, x);
    return true;
  });
  return count;
}

std::vector<Index> support_of(const Vector& x) {
  std::vector<Index> s;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) > 0.0) s.push_back(i);
  }
  return s;
}

}  // namespace

VertexSolution vertex_minimize(const Matrix& a, const Vector& b, const Vector& c, const VertexOptions& options) {
  if (c.size() != a.cols()) throw Error(ErrorCode::kDimensionMismatch, "c must have n entries");
  VertexSolution best;
  bool found = false;
  best.basic_feasible_count = for_each_bfs(a, b, options, [&](const std::vector<Index>& cols, const Vector& x) {
    const double value = c.dot(x);
    auto support = support_of(x);
    const double tie = 1e-12 * std::max(1.0, std::abs(value));
    bool better = !found || value < best.value - tie;
    if (!better && std::abs(value - best.value) <= tie) better = support < best.support;
    if (better) {
      found = true;
      best.x_star = x;
      best.value = value;
      best.basis = cols;
      best.support = std::move(support);
    }
  });
  if (!found) throw Error(ErrorCode::kInfeasible, "no basic feasible solution exists");
  return best;
}

VertexSolution lp_vertex_oracle(const LinearProgram& lp, const VertexOptions& options) {
  return vertex_minimize(lp.a(), lp.b(), lp.c(), options);
}

std::vector<Vector> basic_feasible_solutions(const Matrix& a, const Vector& b, const VertexOptions& options) {
  std::vector<Vector> out;
  for_each_bfs(a, b, options, [&](const std::vector<Index>&, const Vector& x) {
    for (const auto& seen : out) {
      if ((seen - x).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) return;
    }
    out.push_back(x);
  });
  return out;
}

PaperConstants compute_constants(const LinearProgram& lp, const Vector& u0, const ConstantsOptions& options) {
  const Matrix& a = lp.a();
  const Index m = a.rows();
  const Index n = a.cols();
  if (u0.size() != n) throw Error(ErrorCode::kDimensionMismatch, "u0 must have n entries");

  PaperConstants out;
  auto consider = [&](const std::vector<Index>& cols) {
    Eigen::JacobiSVD<Matrix> svd(detail::select_columns(a, cols));
    const Vector& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin > 1e-12 * s(0)) {
      ++out.submatrix_count;
      out.max_inverse_norm = std::max(out.max_inverse_norm, 1.0 / smin);
    }
  };

  const bool exact = n <= options.max_columns && binomial(n, m) <= options.max_subsets;
  if (exact) {
    detail::for_each_combination(n, m, [&](const std::vector<Index>& cols) {
      consider(cols);
      return true;
    });
  } else if (options.allow_heuristic) {
    out.heuristic = true;
    Rng rng(options.seed);
    std::vector<Index> cols;
    for (long s = 0; s < options.samples; ++s) {
      // Floyd's sampling of an m-subset, then sorted.
      std::set<Index> chosen;
      for (Index j = n - m; j < n; ++j) {
        const Index t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      cols.assign(chosen.begin(), chosen.end());
      consider(cols);
    }
  } else {
    check_enumeration_size(m, n, options.max_columns, options.max_subsets);
  }
  if (out.submatrix_count == 0) {
    throw Error(ErrorCode::kSingularHessian, "no invertible m x m column submatrix found");
  }

  const double b_norm = lp.b().norm();
  const double r0_norm = (a * u0.cwiseProduct(u0) - lp.b()).norm();
  out.op_norm = std::sqrt(lp.lipschitz());
  out.r_squared = std::sqrt(static_cast<double>(n)) * out.max_inverse_norm * (r0_norm + b_norm) +
                  std::numbers::e * static_cast<double>(n) * u0.squaredNorm();
  const double residual_term = 1.0 / (4.0 * out.op_norm * (out.op_norm * out.r_squared + b_norm));
  const double curvature_term = 1.0 / (5.0 * lp.lipschitz() * std::max(out.r_squared, 1.0));
  out.eta_bar = std::min(residual_term, curvature_term);
  return out;
}

}  // namespace dlnlp

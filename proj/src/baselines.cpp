#include "dlnlp/baselines.hpp"

#include "dlnlp/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace dlnlp {

namespace {
constexpr double kMaxExponent = 700.0;
}

MirrorState MirrorState::at(const LinearProgram& lp, Vector x_tilde, long k) {
  if (x_tilde.size() != lp.cols()) throw Error(ErrorCode::kDimensionMismatch, "x~ must have n entries");
  if (!(x_tilde.minCoeff() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "x~ must be strictly positive");
  MirrorState s;
  s.x_tilde = std::move(x_tilde);
  s.k = k;
  s.refresh(lp);
  return s;
}

void MirrorState::refresh(const LinearProgram& lp) {
  r.resize(lp.rows());
  grad.resize(lp.cols());
  r.noalias() = lp.a() * x_tilde;
  r -= lp.b();
  grad.noalias() = lp.a().transpose() * r;
  loss = 0.5 * r.squaredNorm();
}

MirrorState mirror_step(const LinearProgram& lp, const MirrorState& state, double l_k) {
  if (!(l_k > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mirror parameter must be positive");
  const double worst = state.grad.lpNorm<Eigen::Infinity>() / l_k;
  if (!(worst <= kMaxExponent)) {
    throw Error(ErrorCode::kOverflow,
                fmt::format("mirror exponent {:g} exceeds {:g}; stepsize too large", worst, kMaxExponent));
  }
  MirrorState next;
  next.x_tilde = state.x_tilde.cwiseProduct((-state.grad / l_k).array().exp().matrix());
  next.k = state.k + 1;
  next.refresh(lp);
  return next;
}

MirrorSolveResult solve_mirror(const LinearProgram& lp, const Vector& x0, const StepsizeRule& rule,
                               const SolverOptions& options) {
  validate(rule);
  const long snap_stride =
      options.snapshot_stride == 0 ? default_snapshot_stride(lp.cols()) : options.snapshot_stride;
  MirrorSolveResult out{MirrorState::at(lp, x0), {}};
  MirrorState& s = out.state;
  SolverTrace& trace = out.trace;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  // The stepsize rules are phrased in u~ = sqrt(x~); a SolverState view
  // carries the quantities they read (u, A'r).
  SolverState view;
  auto finish = [&](TerminationReason reason) {
    if (trace.records.empty() || trace.records.back().k != s.k) {
      trace.records.push_back({s.k, s.loss, s.r.norm(), kNaN});
    } else {
      trace.records.back().eta = kNaN;
    }
    if (snap_stride > 0 && (trace.snapshots.empty() || trace.snapshots.back().k != s.k)) {
      trace.snapshots.push_back({s.k, s.x_tilde.cwiseSqrt()});
    }
    trace.termination = reason;
    return out;
  };

  for (;;) {
    if (!std::isfinite(s.loss)) return finish(TerminationReason::kNonFinite);
    if (s.loss <= options.loss_tol) return finish(TerminationReason::kLossBelowTol);
    if (s.k >= options.max_iters) return finish(TerminationReason::kMaxIters);
    view.u = s.x_tilde.cwiseSqrt();
    view.atr = s.grad;
    const double eta = stepsize_for(rule, lp, view);
    if (s.k % options.record_stride == 0) trace.records.push_back({s.k, s.loss, s.r.norm(), eta});
    if (snap_stride > 0 && s.k % snap_stride == 0) trace.snapshots.push_back({s.k, view.u});
    try {
      s = mirror_step(lp, s, mirror_parameter(eta));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kOverflow) return finish(TerminationReason::kNonFinite);
      throw;
    }
  }
}

SinkhornResult solve_sinkhorn(const OtInstance& ot, double lambda, long max_iters, double marginal_tol) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  const Matrix kernel = (-ot.cost() / lambda).array().exp().matrix();
  if (!(kernel.minCoeff() > 0.0) || !(kernel.minCoeff() >= std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::kKernelUnderflow,
                fmt::format("exp(-C/lambda) underflows for lambda={:g}; cost scale too large for the linear domain",
                            lambda));
  }
  const Vector& w = ot.row_marginal();
  const Vector& v = ot.col_marginal();
  SinkhornResult out;
  out.p = Vector::Ones(ot.rows());
  out.q = Vector::Ones(ot.cols());
  auto residuals = [&] {
    out.plan = out.p.asDiagonal() * kernel * out.q.asDiagonal();
    out.row_residual = (out.plan.rowwise().sum() - w).lpNorm<1>();
    out.col_residual = (out.plan.colwise().sum().transpose() - v).lpNorm<1>();
  };
  for (out.iterations = 0; out.iterations < max_iters;) {
    out.p = w.cwiseQuotient(kernel * out.q);
    out.q = v.cwiseQuotient(kernel.transpose() * out.p);
    ++out.iterations;
    residuals();
    if (!out.plan.allFinite()) throw Error(ErrorCode::kNonFinite, "Sinkhorn scalings overflowed");
    if (out.row_residual <= marginal_tol && out.col_residual <= marginal_tol) {
      out.converged = true;
      return out;
    }
  }
  if (out.iterations == 0) residuals();
  return out;
}

}  // namespace dlnlp

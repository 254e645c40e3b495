#include "dlnlp/dln_solver.hpp"

#include "dlnlp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace dlnlp {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// fifth-order minus embedded fourth-order weights
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 - (-92097.0 / 339200), e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

class FlowRhs {
 public:
  explicit FlowRhs(const LinearProgram& lp) : lp_(lp), r_(lp.rows()), atr_(lp.cols()) {}

  void operator()(const Vector& u, Vector& du) {
    r_.noalias() = lp_.a() * u.cwiseProduct(u);
    r_ -= lp_.b();
    atr_.noalias() = lp_.a().transpose() * r_;
    du = -2.0 * u.cwiseProduct(atr_);
  }

  double residual(const Vector& u) {
    r_.noalias() = lp_.a() * u.cwiseProduct(u);
    r_ -= lp_.b();
    return r_.norm();
  }

 private:
  const LinearProgram& lp_;
  Vector r_;
  Vector atr_;
};

}  // namespace

FlowResult integrate_flow(const LinearProgram& lp, const Vector& alpha, const FlowOptions& options) {
  if (alpha.size() != lp.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "alpha must have n entries");
  }
  if (!(alpha.minCoeff() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be strictly positive");
  if (!(options.t_end >= 0.0) || !(options.rtol > 0.0) || !(options.atol >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "flow options need t_end >= 0, rtol > 0, atol >= 0");
  }

  FlowRhs rhs(lp);
  const Index n = lp.cols();
  FlowResult out;
  out.u = alpha;
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), stage(n), next(n), err(n);
  rhs(out.u, k1);

  double t = 0.0;
  double dt = std::min(options.initial_dt, options.t_end);
  out.residual = rhs.residual(out.u);
  while (t < options.t_end) {
    if (options.residual_tol > 0.0 && out.residual <= options.residual_tol) break;
    if (out.accepted + out.rejected >= options.max_steps) {
      throw Error(ErrorCode::kNoConvergence, fmt::format("flow exceeded {} steps at t={:g}", options.max_steps, t));
    }
    if (dt < 1e-15) throw Error(ErrorCode::kStepUnderflow, fmt::format("dt={:g} at t={:g}", dt, t));
    const double h = std::min(dt, options.t_end - t);
    const Vector& u = out.u;

    stage = u + h * a21 * k1;
    rhs(stage, k2);
    stage = u + h * (a31 * k1 + a32 * k2);
    rhs(stage, k3);
    stage = u + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(stage, k4);
    stage = u + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(stage, k5);
    stage = u + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(stage, k6);
    next = u + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(next, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double scale = options.atol + options.rtol * std::max(std::abs(u(i)), std::abs(next(i)));
      err_norm = std::max(err_norm, std::abs(err(i)) / scale);
    }
    const bool positive = next.allFinite() && next.minCoeff() > 0.0;
    if (!positive || !(err_norm <= 1.0)) {
      ++out.rejected;
      const double shrink = positive && std::isfinite(err_norm) ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 0.5)
                                                                : 0.5;
      dt = h * shrink;
      continue;
    }
    ++out.accepted;
    t += h;
    out.u.swap(next);
    k1.swap(k7);  // first-same-as-last
    out.residual = rhs.residual(out.u);
    const double grow = err_norm > 0.0 ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0) : 5.0;
    dt = h * grow;
  }
  out.t = t;
  return out;
}

}  // namespace dlnlp

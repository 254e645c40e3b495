#pragma once

#include "dlnlp/dln_solver.hpp"
#include "dlnlp/lp_core.hpp"
#include "dlnlp/reductions.hpp"

namespace dlnlp {

// Entropic mirror descent (exponentiated gradient) on g(x) = |Ax - b|^2 / 2.
struct MirrorState {
  Vector x_tilde;
  long k = 0;
  Vector r;
  Vector grad;  // A'r = grad g(x~)
  double loss = 0.0;

  static MirrorState at(const LinearProgram& lp, Vector x_tilde, long k = 0);
  void refresh(const LinearProgram& lp);
};

// x~+ = x~ o exp(-grad g(x~) / l_k). Throws Overflow when an exponent exceeds
// 700 in magnitude.
MirrorState mirror_step(const LinearProgram& lp, const MirrorState& state, double l_k);

// Mirror parameter matching a reparametrized-descent stepsize to first
// order: L = 1 / (4 eta).
inline double mirror_parameter(double eta) { return 0.25 / eta; }

struct MirrorSolveResult {
  MirrorState state;
  SolverTrace trace;
};

// Each iteration evaluates `rule` at u~ = sqrt(x~) exactly as the
// reparametrized solver would and steps with l_k = mirror_parameter(eta_k).
// Trace records carry eta_k in the eta column; snapshots hold u~.
MirrorSolveResult solve_mirror(const LinearProgram& lp, const Vector& x0, const StepsizeRule& rule,
                               const SolverOptions& options = {});

struct SinkhornResult {
  Matrix plan;
  Vector p;
  Vector q;
  long iterations = 0;
  double row_residual = 0.0;  // |X1 - w|_1
  double col_residual = 0.0;  // |X'1 - v|_1
  bool converged = false;
};

// Linear-domain Sinkhorn on K = exp(-C / lambda) from p = 1, q = 1.
SinkhornResult solve_sinkhorn(const OtInstance& ot, double lambda, long max_iters, double marginal_tol);

}  // namespace dlnlp

#pragma once

#include "dlnlp/lp_core.hpp"

#include <string>
#include <variant>
#include <vector>

namespace dlnlp {

// Stepsize policies. Adaptive evaluates the per-iteration bound
//   eta_k <= min{ 1 / (4 ||A'r||_inf), 1 / (5 L ||u||_inf^2) }
// scaled by `safety`; ScaledAdaptive multiplies the same bound by `factor`
// and so may exceed it.
struct Adaptive {
  double safety = 1.0;
};
struct Constant {
  double eta = 0.0;
};
struct ScaledAdaptive {
  double factor = 1.0;
};
using StepsizeRule = std::variant<Adaptive, Constant, ScaledAdaptive>;

void validate(const StepsizeRule& rule);
std::string describe(const StepsizeRule& rule);

// u0 = alpha * 1, or u0_i = exp(-c_i / (2 lambda)).
struct UniformAlpha {
  double alpha = 1e-3;
};
struct CostScaled {
  double lambda = 1.0;
};
using InitSpec = std::variant<UniformAlpha, CostScaled>;

std::string describe(const InitSpec& init);
Vector initial_point(const LinearProgram& lp, const InitSpec& init);

// Iterate of the reparametrized descent with its derived quantities:
// r = A(u o u) - b, f = |r|^2 / 2, atr = A'r, grad = 2 u o atr.
struct SolverState {
  Vector u;
  long k = 0;
  Vector r;
  double f = 0.0;
  Vector atr;
  Vector grad;
  double last_stepsize = 0.0;

  static SolverState at(const LinearProgram& lp, Vector u, long k = 0);
  void refresh(const LinearProgram& lp);
  Vector x() const { return u.cwiseProduct(u); }
  double res_norm() const { return r.norm(); }
};

double loss_g(const LinearProgram& lp, const Vector& x);
double loss_f(const LinearProgram& lp, const Vector& u);
Vector grad_f(const LinearProgram& lp, const Vector& u);

double adaptive_stepsize(const LinearProgram& lp, const SolverState& state, double safety = 1.0);
double stepsize_for(const StepsizeRule& rule, const LinearProgram& lp, const SolverState& state);

// True when eta satisfies the per-iteration bound at `state` (with a relative
// slack for round-off in the bound itself).
bool honors_stepsize_bound(const LinearProgram& lp, const SolverState& state, double eta,
                           double rel_slack = 1e-12);

// u+ = u o (1 - 2 eta A'r). Throws PositivityLost when a coordinate of u+
// is not positive and NonFinite on overflow.
SolverState dln_step(const LinearProgram& lp, const SolverState& state, double eta);

enum class TerminationReason { kLossBelowTol, kMaxIters, kNonFinite, kPositivityLost };
std::string to_string(TerminationReason reason);

// What to do when a step drives a coordinate of u through zero. kReflect
// keeps |u|, which leaves the x = u o u iterates of plain gradient descent
// unchanged; only an exact zero is then fatal.
enum class PositivityPolicy { kStop, kReflect };

struct TraceRecord {
  long k = 0;
  double f = 0.0;
  double res_norm = 0.0;
  double eta = 0.0;  // stepsize taken from iterate k; NaN on the final record
};

struct Snapshot {
  long k = 0;
  Vector u;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  std::vector<Snapshot> snapshots;
  TerminationReason termination = TerminationReason::kMaxIters;
  long sign_flips = 0;
};

struct SolverOptions {
  long max_iters = 5000;
  double loss_tol = 0.0;
  long snapshot_stride = 0;  // 0: 1 when n <= 64 else 10; negative: none
  long record_stride = 1;    // scalar records kept every this many iterations
  PositivityPolicy positivity = PositivityPolicy::kStop;
};

long default_snapshot_stride(Index n);

struct SolveResult {
  SolverState state;
  SolverTrace trace;
};

SolveResult solve_dln(const LinearProgram& lp, const InitSpec& init, const StepsizeRule& rule,
                      const SolverOptions& options = {});
SolveResult solve_dln(const LinearProgram& lp, const Vector& u0, const StepsizeRule& rule,
                      const SolverOptions& options = {});

// Componentwise check of
//   -2 S1 - 8 S2 <= log(u^K / u^0) <= -2 S1,
//   S1 = sum_j eta_j A'r^j,  S2 = sum_j eta_j^2 (A'r^j)^2,
// along a trace that holds a snapshot of every iterate.
struct LogBoundReport {
  long steps = 0;
  double max_violation = 0.0;
  double max_lower_violation = 0.0;
  double max_upper_violation = 0.0;
  Vector log_ratio;
  Vector lower;
  Vector upper;
};

LogBoundReport check_log_bound(const SolverTrace& trace, const LinearProgram& lp);

// Gradient flow du/dt = -2 u o (A'r(t)) integrated by the Dormand-Prince
// 5(4) pair. Steps that fail the error test or leave the positive orthant
// are rejected and retried with a smaller dt.
struct FlowOptions {
  double t_end = 100.0;
  double rtol = 1e-12;
  double atol = 1e-14;
  double residual_tol = 0.0;  // stop early once ||r||_2 falls below this
  double initial_dt = 1e-3;
  long max_steps = 50'000'000;
};

struct FlowResult {
  Vector u;
  double t = 0.0;
  long accepted = 0;
  long rejected = 0;
  double residual = 0.0;
};

FlowResult integrate_flow(const LinearProgram& lp, const Vector& alpha, const FlowOptions& options = {});

void write_trace_csv(const SolverTrace& trace, const std::filesystem::path& path);
void write_snapshots(const SolverTrace& trace, const std::filesystem::path& path);

}  // namespace dlnlp

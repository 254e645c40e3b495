#include "dlnlp/dln_solver.hpp"

#include "dlnlp/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace dlnlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dims(const LinearProgram& lp, const Vector& v, const char* what) {
  if (v.size() != lp.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} has {} entries, LP has n={}", what, v.size(), lp.cols()));
  }
}

}  // namespace

void validate(const StepsizeRule& rule) {
  std::visit(Overloaded{
                 [](const Adaptive& r) {
                   if (!(r.safety > 0.0 && r.safety <= 1.0)) {
                     throw Error(ErrorCode::kInvalidArgument, "adaptive safety must lie in (0, 1]");
                   }
                 },
                 [](const Constant& r) {
                   if (!(r.eta > 0.0) || !std::isfinite(r.eta)) {
                     throw Error(ErrorCode::kInvalidArgument, "constant stepsize must be positive");
                   }
                 },
                 [](const ScaledAdaptive& r) {
                   if (!(r.factor > 0.0) || !std::isfinite(r.factor)) {
                     throw Error(ErrorCode::kInvalidArgument, "stepsize scale factor must be positive");
                   }
                 },
             },
             rule);
}

std::string describe(const StepsizeRule& rule) {
  return std::visit(Overloaded{
                        [](const Adaptive& r) { return fmt::format("adaptive(safety={})", r.safety); },
                        [](const Constant& r) { return fmt::format("const({:.17g})", r.eta); },
                        [](const ScaledAdaptive& r) { return fmt::format("scaled({})", r.factor); },
                    },
                    rule);
}

std::string describe(const InitSpec& init) {
  return std::visit(Overloaded{
                        [](const UniformAlpha& i) { return fmt::format("uniform(alpha={:g})", i.alpha); },
                        [](const CostScaled& i) { return fmt::format("cost-scaled(lambda={:g})", i.lambda); },
                    },
                    init);
}

Vector initial_point(const LinearProgram& lp, const InitSpec& init) {
  return std::visit(Overloaded{
                        [&](const UniformAlpha& i) -> Vector {
                          if (!(i.alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
                          return Vector::Constant(lp.cols(), i.alpha);
                        },
                        [&](const CostScaled& i) -> Vector {
                          if (!(i.lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
                          return (-lp.c().array() / (2.0 * i.lambda)).exp().matrix();
                        },
                    },
                    init);
}

SolverState SolverState::at(const LinearProgram& lp, Vector u, long k) {
  check_dims(lp, u, "u");
  SolverState s;
  s.u = std::move(u);
  s.k = k;
  s.refresh(lp);
  return s;
}

void SolverState::refresh(const LinearProgram& lp) {
  r.resize(lp.rows());
  atr.resize(lp.cols());
  grad.resize(lp.cols());
  r.noalias() = lp.a() * u.cwiseProduct(u);
  r -= lp.b();
  f = 0.5 * r.squaredNorm();
  atr.noalias() = lp.a().transpose() * r;
  grad = 2.0 * u.cwiseProduct(atr);
}

double loss_g(const LinearProgram& lp, const Vector& x) {
  check_dims(lp, x, "x");
  return 0.5 * (lp.a() * x - lp.b()).squaredNorm();
}

double loss_f(const LinearProgram& lp, const Vector& u) { return loss_g(lp, u.cwiseProduct(u)); }

Vector grad_f(const LinearProgram& lp, const Vector& u) {
  check_dims(lp, u, "u");
  const Vector r = lp.a() * u.cwiseProduct(u) - lp.b();
  return 2.0 * u.cwiseProduct(lp.a().transpose() * r);
}

double adaptive_stepsize(const LinearProgram& lp, const SolverState& state, double safety) {
  const double atr_inf = state.atr.lpNorm<Eigen::Infinity>();
  const double u_inf = state.u.lpNorm<Eigen::Infinity>();
  const double residual_term = atr_inf > 0.0 ? 1.0 / (4.0 * atr_inf) : kInf;
  const double curvature = 5.0 * lp.lipschitz() * u_inf * u_inf;
  const double curvature_term = curvature > 0.0 ? 1.0 / curvature : kInf;
  const double bound = std::min(residual_term, curvature_term);
  if (!std::isfinite(bound)) {
    throw Error(ErrorCode::kInvalidArgument, "stepsize bound is unbounded (A = 0 or u = 0)");
  }
  return safety * bound;
}

double stepsize_for(const StepsizeRule& rule, const LinearProgram& lp, const SolverState& state) {
  return std::visit(Overloaded{
                        [&](const Adaptive& r) { return adaptive_stepsize(lp, state, r.safety); },
                        [&](const Constant& r) { return r.eta; },
                        [&](const ScaledAdaptive& r) { return r.factor * adaptive_stepsize(lp, state, 1.0); },
                    },
                    rule);
}

bool honors_stepsize_bound(const LinearProgram& lp, const SolverState& state, double eta, double rel_slack) {
  return eta <= adaptive_stepsize(lp, state, 1.0) * (1.0 + rel_slack);
}

namespace {

enum class StepStatus { kOk, kNonFinite, kPositivityLost };

// Computes u o (1 - 2 eta A'r) into `scratch`; on success swaps it into the
// state and refreshes the caches, otherwise leaves the state untouched.
StepStatus apply_step(const LinearProgram& lp, SolverState& s, double eta, PositivityPolicy policy,
                      Vector& scratch, long* flips) {
  scratch.resize(s.u.size());
  scratch.array() = s.u.array() * (1.0 - 2.0 * eta * s.atr.array());
  if (!scratch.allFinite()) return StepStatus::kNonFinite;
  if (scratch.minCoeff() <= 0.0) {
    if (policy == PositivityPolicy::kStop) return StepStatus::kPositivityLost;
    long flipped = 0;
    for (Index i = 0; i < scratch.size(); ++i) {
      if (scratch(i) == 0.0) return StepStatus::kPositivityLost;
      if (scratch(i) < 0.0) {
        scratch(i) = -scratch(i);
        ++flipped;
      }
    }
    if (flips != nullptr) *flips += flipped;
  }
  const double previous_f = s.f;
  s.u.swap(scratch);
  s.refresh(lp);
  if (!std::isfinite(s.f)) {
    s.u.swap(scratch);
    s.f = previous_f;
    s.refresh(lp);
    return StepStatus::kNonFinite;
  }
  ++s.k;
  s.last_stepsize = eta;
  return StepStatus::kOk;
}

}  // namespace

SolverState dln_step(const LinearProgram& lp, const SolverState& state, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "stepsize must be positive");
  SolverState next = state;
  Vector scratch;
  switch (apply_step(lp, next, eta, PositivityPolicy::kStop, scratch, nullptr)) {
    case StepStatus::kOk:
      return next;
    case StepStatus::kNonFinite:
      throw Error(ErrorCode::kNonFinite, fmt::format("step {} overflowed (eta={:g})", state.k, eta));
    case StepStatus::kPositivityLost:
      throw Error(ErrorCode::kPositivityLost,
                  fmt::format("step {} left the positive orthant (eta={:g} exceeds the stepsize bound)",
                              state.k, eta));
  }
  return next;
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kLossBelowTol: return "LossBelowTol";
    case TerminationReason::kMaxIters: return "MaxIters";
    case TerminationReason::kNonFinite: return "NonFinite";
    case TerminationReason::kPositivityLost: return "PositivityLost";
  }
  return "Unknown";
}

long default_snapshot_stride(Index n) { return n <= 64 ? 1 : 10; }

SolveResult solve_dln(const LinearProgram& lp, const InitSpec& init, const StepsizeRule& rule,
                      const SolverOptions& options) {
  return solve_dln(lp, initial_point(lp, init), rule, options);
}

SolveResult solve_dln(const LinearProgram& lp, const Vector& u0, const StepsizeRule& rule,
                      const SolverOptions& options) {
  validate(rule);
  check_dims(lp, u0, "u0");
  if (!(u0.minCoeff() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "u0 must be strictly positive");
  if (options.max_iters < 0 || options.record_stride < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 0 and record_stride >= 1");
  }
  const long snap_stride =
      options.snapshot_stride == 0 ? default_snapshot_stride(lp.cols()) : options.snapshot_stride;

  SolveResult out{SolverState::at(lp, u0), {}};
  SolverState& s = out.state;
  SolverTrace& trace = out.trace;
  Vector scratch(lp.cols());

  auto snapshot = [&] {
    if (snap_stride > 0 && (trace.snapshots.empty() || trace.snapshots.back().k != s.k)) {
      trace.snapshots.push_back({s.k, s.u});
    }
  };
  auto finish = [&](TerminationReason reason) {
    if (trace.records.empty() || trace.records.back().k != s.k) {
      trace.records.push_back({s.k, s.f, s.res_norm(), kNaN});
    } else {
      trace.records.back().eta = kNaN;
    }
    snapshot();
    trace.termination = reason;
  };

  if (!std::isfinite(s.f)) {
    finish(TerminationReason::kNonFinite);
    return out;
  }
  for (;;) {
    if (s.f <= options.loss_tol) return finish(TerminationReason::kLossBelowTol), out;
    if (s.k >= options.max_iters) return finish(TerminationReason::kMaxIters), out;

    const double eta = stepsize_for(rule, lp, s);
    if (!(eta > 0.0) || !std::isfinite(eta)) return finish(TerminationReason::kNonFinite), out;
    if (s.k % options.record_stride == 0) trace.records.push_back({s.k, s.f, s.res_norm(), eta});
    if (snap_stride > 0 && s.k % snap_stride == 0) snapshot();

    switch (apply_step(lp, s, eta, options.positivity, scratch, &trace.sign_flips)) {
      case StepStatus::kOk:
        break;
      case StepStatus::kNonFinite:
        return finish(TerminationReason::kNonFinite), out;
      case StepStatus::kPositivityLost:
        return finish(TerminationReason::kPositivityLost), out;
    }
  }
}

LogBoundReport check_log_bound(const SolverTrace& trace, const LinearProgram& lp) {
  const auto& snaps = trace.snapshots;
  if (snaps.empty()) throw Error(ErrorCode::kMissingSnapshots, "trace has no snapshots");
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    if (snaps[i].k != snaps.front().k + static_cast<long>(i)) {
      throw Error(ErrorCode::kMissingSnapshots, "log bound needs a snapshot of every iterate");
    }
  }
  std::map<long, double> eta_at;
  for (const auto& rec : trace.records) eta_at[rec.k] = rec.eta;

  const Index n = lp.cols();
  Vector s1 = Vector::Zero(n);
  Vector s2 = Vector::Zero(n);
  for (std::size_t j = 0; j + 1 < snaps.size(); ++j) {
    auto it = eta_at.find(snaps[j].k);
    if (it == eta_at.end() || !std::isfinite(it->second)) {
      throw Error(ErrorCode::kMissingSnapshots, fmt::format("no stepsize recorded for k={}", snaps[j].k));
    }
    const double eta = it->second;
    const Vector atr = lp.a().transpose() * (lp.a() * snaps[j].u.cwiseProduct(snaps[j].u) - lp.b());
    s1 += eta * atr;
    s2 += eta * eta * atr.cwiseProduct(atr);
  }
  LogBoundReport report;
  report.steps = static_cast<long>(snaps.size()) - 1;
  report.log_ratio = (snaps.back().u.array() / snaps.front().u.array()).log().matrix();
  report.upper = -2.0 * s1;
  report.lower = -2.0 * s1 - 8.0 * s2;
  report.max_lower_violation = std::max(0.0, (report.lower - report.log_ratio).maxCoeff());
  report.max_upper_violation = std::max(0.0, (report.log_ratio - report.upper).maxCoeff());
  report.max_violation = std::max(report.max_lower_violation, report.max_upper_violation);
  return report;
}

void write_trace_csv(const SolverTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "k,f,res_norm,eta\n";
  for (const auto& rec : trace.records) {
    out << rec.k << ',' << format_real(rec.f) << ',' << format_real(rec.res_norm) << ','
        << format_real(rec.eta) << '\n';
  }
}

void write_snapshots(const SolverTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto& snap : trace.snapshots) {
    out << snap.k;
    for (Index i = 0; i < snap.u.size(); ++i) out << ' ' << format_real(snap.u(i));
    out << '\n';
  }
}

}  // namespace dlnlp

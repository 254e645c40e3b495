#pragma once

#include "dlnlp/baselines.hpp"
#include "dlnlp/dln_solver.hpp"
#include "dlnlp/lp_core.hpp"
#include "dlnlp/oracles.hpp"
#include "dlnlp/reductions.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dlnlp {

enum class Experiment { kSolve, kCompareMd, kSweepInit, kOt, kBp, kFlowCheck, kConstants };

std::string to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

// "adaptive", "adaptive:SAFETY", "const:ETA", "scaled:F" or "etabar".
struct StepsizeSetting {
  StepsizeRule rule = Adaptive{};
  bool eta_bar = false;  // constant stepsize equal to the computed eta_bar
};
StepsizeSetting parse_stepsize(const std::string& text);
std::string describe(const StepsizeSetting& s);

// Unset optional fields fall back to per-experiment defaults.
struct ExperimentConfig {
  Experiment experiment = Experiment::kSolve;
  std::optional<std::filesystem::path> instance_file;
  std::optional<InstanceSeedSpec> gen;  // (m, n, seed); (rows, cols, seed) for ot; (samples, p, seed) for bp
  std::vector<double> alphas;
  std::optional<double> lambda;
  std::optional<StepsizeSetting> stepsize;
  std::optional<long> iters;
  double tol = 0.0;
  std::filesystem::path out_dir = "out";
  bool paper_scale = false;

  // Throws InvalidArgument on two instance sources, non-positive alphas or
  // lambda, negative budgets, or an output directory that cannot be created.
  void validate() const;
};

struct GapReport {
  double alpha = 0.0;
  double relative_gap = 0.0;
  double terminal_loss = 0.0;  // |r|^2 / |b|^2 at the last iterate
  long iterations = 0;
};

// 1'(x_hat - x_star) / max{1, 1'x_star}.
double relative_gap(const Vector& x_hat, const Vector& x_star);
// |Ax - b|^2 / |b|^2, or |Ax - b|^2 when b = 0.
double normalized_loss(const LinearProgram& lp, double f);

struct CompareMdResult {
  SolverTrace dln;
  SolverTrace mirror;
  double max_relative_gap = 0.0;  // max_k |a_k - b_k| / max(a_k, b_k) over paired records
  long separation_iter = -1;      // first k where that gap exceeds 0.1
  double dln_final_loss = 0.0;
  double mirror_final_loss = 0.0;
};

struct SweepResult {
  std::vector<GapReport> rows;
  std::string oracle;  // "vertex", "entropy(lambda=...)" or "none"
  std::vector<SolverTrace> traces;
};

struct OtRunResult {
  Matrix plan_dln;
  Matrix plan_sinkhorn;
  Matrix plan_oracle;
  double dln_vs_oracle = 0.0;  // l_inf distances
  double sinkhorn_vs_oracle = 0.0;
  double dln_vs_sinkhorn = 0.0;
  SinkhornResult sinkhorn;
  PaperConstants constants;
  double eta = 0.0;
  long dln_iterations = 0;
  double dln_final_loss = 0.0;
};

struct BpRunResult {
  Vector beta_dln;
  Vector beta_mirror;
  Vector beta_oracle;
  std::optional<Vector> beta_vertex;
  std::optional<Vector> planted;
  double dln_vs_oracle = 0.0;
  double mirror_vs_oracle = 0.0;
};

struct FlowCheckResult {
  FlowResult flow;
  Vector x_oracle;
  double distance = 0.0;  // l_inf
};

struct ConstantsResult {
  PaperConstants constants;
  double max_u_norm_sq = 0.0;  // along the run
  long iterations = 0;
  bool bounded = false;
};

// Instance resolution shared by the runners (file, --gen, or the
// experiment's default generated size).
LinearProgram load_lp(const ExperimentConfig& config);

// Each runner writes its CSV/SVG outputs into config.out_dir and returns
// the numbers it reported. Solver errors propagate as Error.
SolveResult run_solve(const ExperimentConfig& config);
CompareMdResult run_compare_md(const ExperimentConfig& config);
SweepResult run_sweep_init(const ExperimentConfig& config);
OtRunResult run_ot(const ExperimentConfig& config);
BpRunResult run_bp(const ExperimentConfig& config);
FlowCheckResult run_flow_check(const ExperimentConfig& config);
ConstantsResult run_constants(const ExperimentConfig& config);

// Validates, dispatches, and writes manifest.json. Returns 0 on success,
// 2 when a solver diagnostic stopped the run, 1 on invalid configuration.
int run_experiment(const ExperimentConfig& config);

}  // namespace dlnlp

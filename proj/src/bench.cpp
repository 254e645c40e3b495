#include "dlnlp/bench.hpp"

#include "dlnlp/error.hpp"
#include "dlnlp/svg_plot.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <system_error>

namespace dlnlp {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kVersion = "0.1.0";

// Side information a runner wants recorded in the manifest.
struct RunLog {
  json terminations = json::object();
  std::vector<std::string> notes;
  json summary = json::object();
  bool diagnostic = false;

  void termination(const std::string& run, TerminationReason reason) {
    terminations[run] = to_string(reason);
    if (reason == TerminationReason::kNonFinite || reason == TerminationReason::kPositivityLost) diagnostic = true;
  }
};

double parse_real(const std::string& text, const char* what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{}: cannot parse '{}'", what, text));
  }
  return value;
}

std::string real(double v) { return format_real(v); }

// Trace CSV with the normalized loss column the plots read.
void write_trace(const SolverTrace& trace, const LinearProgram& lp, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "k,f,res_norm,normalized_loss,eta\n";
  for (const auto& rec : trace.records) {
    out << rec.k << ',' << real(rec.f) << ',' << real(rec.res_norm) << ',' << real(normalized_loss(lp, rec.f)) << ','
        << real(rec.eta) << '\n';
  }
}

PlotSeries series_from_csv(const fs::path& path, const std::string& label) {
  auto cols = read_csv_columns(path);
  return {label, cols.at("k"), cols.at("normalized_loss")};
}

Index default_m(const ExperimentConfig& c) { return c.paper_scale ? 300 : 30; }

InstanceSeedSpec default_gen(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::kCompareMd:
    case Experiment::kSweepInit: return {default_m(c), 10 * default_m(c), 0};
    case Experiment::kOt: return {5, 5, 0};
    case Experiment::kBp: return {6, 10, 0};
    case Experiment::kFlowCheck: return {3, 8, 0};
    case Experiment::kConstants: return {2, 4, 0};
    case Experiment::kSolve: break;
  }
  return {10, 40, 0};
}

double first_alpha(const ExperimentConfig& c) { return c.alphas.empty() ? 1e-3 : c.alphas.front(); }

InitSpec init_for(const ExperimentConfig& c) {
  if (c.lambda) return CostScaled{*c.lambda};
  return UniformAlpha{first_alpha(c)};
}

PaperConstants constants_with_fallback(const LinearProgram& lp, const Vector& u0, RunLog& log) {
  try {
    return compute_constants(lp, u0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooLarge) throw;
  }
  ConstantsOptions opts;
  opts.allow_heuristic = true;
  log.notes.push_back("R^2 estimated from sampled column submatrices (exact enumeration too large)");
  return compute_constants(lp, u0, opts);
}

StepsizeRule resolve_rule(const StepsizeSetting& s, const LinearProgram& lp, const Vector& u0, RunLog& log) {
  if (!s.eta_bar) return s.rule;
  const PaperConstants pc = constants_with_fallback(lp, u0, log);
  log.summary["eta_bar"] = pc.eta_bar;
  log.summary["r_squared"] = pc.r_squared;
  return Constant{pc.eta_bar};
}

SolverOptions options_for(const StepsizeRule& rule, long iters, double tol) {
  SolverOptions o;
  o.max_iters = iters;
  o.loss_tol = tol;
  o.snapshot_stride = -1;
  o.record_stride = std::max(1L, iters / 20000);
  if (std::holds_alternative<ScaledAdaptive>(rule)) o.positivity = PositivityPolicy::kReflect;
  return o;
}

OtInstance load_ot(const ExperimentConfig& c) {
  if (c.instance_file) return read_ot(*c.instance_file);
  const auto g = c.gen.value_or(default_gen(c));
  return gen_ot_instance(g.m, g.n, g.rng_seed);
}

struct LoadedBp {
  BasisPursuitInstance instance;
  std::optional<Vector> planted;
};

LoadedBp load_bp(const ExperimentConfig& c) {
  if (c.instance_file) return {read_bp(*c.instance_file), std::nullopt};
  const auto g = c.gen.value_or(default_gen(c));
  auto gen = gen_bp_instance(g.m, g.n, std::max<Index>(1, g.m / 3), g.rng_seed);
  return {std::move(gen.instance), std::move(gen.planted_beta)};
}

double linf(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

void write_columns(const fs::path& path, const std::vector<std::string>& names, const std::vector<Vector>& cols) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "i";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  const Index len = cols.empty() ? 0 : cols.front().size();
  for (Index i = 0; i < len; ++i) {
    out << i;
    for (const auto& col : cols) out << ',' << real(col(i));
    out << '\n';
  }
}

void write_pairs(const fs::path& path, const std::vector<std::pair<std::string, double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "name,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << real(v) << '\n';
}

// Internal runners record manifest details into `log`.

SolveResult solve_impl(const ExperimentConfig& c, RunLog& log) {
  fs::create_directories(c.out_dir);
  const LinearProgram lp = load_lp(c);
  const Vector u0 = initial_point(lp, init_for(c));
  const StepsizeRule rule = resolve_rule(c.stepsize.value_or(StepsizeSetting{}), lp, u0, log);
  const long iters = c.iters.value_or(5000);
  SolveResult res = solve_dln(lp, u0, rule, options_for(rule, iters, c.tol));
  log.termination("dln", res.trace.termination);
  write_trace(res.trace, lp, c.out_dir / "trace.csv");
  write_columns(c.out_dir / "solution.csv", {"u", "x"}, {res.state.u, res.state.x()});
  write_line_plot_svg(c.out_dir / "loss.svg", {"DLN loss", "iteration", "|r|^2 / |b|^2"},
                      {series_from_csv(c.out_dir / "trace.csv", "DLN")});
  log.summary["final_normalized_loss"] = normalized_loss(lp, res.state.f);
  log.summary["iterations"] = res.state.k;
  return res;
}

CompareMdResult compare_impl(const ExperimentConfig& c, RunLog& log) {
  fs::create_directories(c.out_dir);
  const LinearProgram lp = load_lp(c);
  const double alpha = first_alpha(c);
  const StepsizeSetting setting = c.stepsize.value_or(StepsizeSetting{});
  const Vector u0 = Vector::Constant(lp.cols(), alpha);
  const StepsizeRule rule = resolve_rule(setting, lp, u0, log);
  const long iters = c.iters.value_or(5000);
  SolverOptions opts = options_for(rule, iters, c.tol);
  opts.record_stride = 1;

  CompareMdResult out;
  const SolveResult dln = solve_dln(lp, u0, rule, opts);
  const MirrorSolveResult md = solve_mirror(lp, u0.cwiseProduct(u0), rule, opts);
  log.termination("dln", dln.trace.termination);
  log.termination("mirror", md.trace.termination);
  if (dln.trace.sign_flips > 0) {
    log.notes.push_back(fmt::format("DLN coordinates crossed zero {} times; |u| kept", dln.trace.sign_flips));
  }
  out.dln = dln.trace;
  out.mirror = md.trace;
  out.dln_final_loss = normalized_loss(lp, dln.state.f);
  out.mirror_final_loss = normalized_loss(lp, md.state.loss);

  const std::size_t paired = std::min(out.dln.records.size(), out.mirror.records.size());
  for (std::size_t i = 0; i < paired; ++i) {
    const double a = out.dln.records[i].f, b = out.mirror.records[i].f;
    const double scale = std::max(a, b);
    const double gap = scale > 0.0 ? std::abs(a - b) / scale : 0.0;
    if (gap > out.max_relative_gap) out.max_relative_gap = gap;
    if (gap > 0.1 && out.separation_iter < 0) out.separation_iter = out.dln.records[i].k;
  }

  write_trace(out.dln, lp, c.out_dir / "dln.csv");
  write_trace(out.mirror, lp, c.out_dir / "md.csv");
  write_line_plot_svg(c.out_dir / "compare.svg",
                      {fmt::format("DLN vs mirror descent ({})", describe(rule)), "iteration", "|r|^2 / |b|^2"},
                      {series_from_csv(c.out_dir / "dln.csv", "DLN"),
                       series_from_csv(c.out_dir / "md.csv", "mirror descent")});
  log.summary["max_relative_gap"] = out.max_relative_gap;
  log.summary["separation_iter"] = out.separation_iter;
  log.summary["dln_final_normalized_loss"] = out.dln_final_loss;
  log.summary["mirror_final_normalized_loss"] = out.mirror_final_loss;
  return out;
}

SweepResult sweep_impl(const ExperimentConfig& c, RunLog& log) {
  fs::create_directories(c.out_dir);
  const LinearProgram lp = load_lp(c);
  std::vector<double> alphas = c.alphas;
  if (alphas.empty()) alphas = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  const long iters = c.iters.value_or(5000);

  SweepResult out;
  std::optional<Vector> x_star;
  const VertexOptions vopts;
  if (lp.cols() <= vopts.max_columns && binomial(lp.cols(), lp.rows()) <= vopts.max_subsets) {
    x_star = lp_vertex_oracle(lp, vopts).x_star;
    out.oracle = "vertex";
  } else {
    const double lam = c.lambda.value_or(1e-2);
    out.oracle = fmt::format("entropy(lambda={})", lam);
    try {
      x_star = solve_entropy_lp(EntropyRegularizedLp::from_lambda(lp, lam)).x;
      log.notes.push_back(fmt::format(
          "relative gap measured against the entropy-regularized solution with lambda={} (vertex enumeration too large)",
          lam));
    } catch (const Error& e) {
      out.oracle = "none";
      log.notes.push_back(fmt::format("OracleUnavailable: {}; gap column is NaN", e.what()));
    }
  }

  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const Vector u0 = Vector::Constant(lp.cols(), alphas[i]);
    const StepsizeRule rule = resolve_rule(c.stepsize.value_or(StepsizeSetting{}), lp, u0, log);
    SolverOptions opts = options_for(rule, iters, c.tol);
    SolveResult res = solve_dln(lp, u0, rule, opts);
    log.termination(fmt::format("alpha={}", alphas[i]), res.trace.termination);
    const double gap = x_star ? relative_gap(res.state.x(), *x_star) : kNaN;
    out.rows.push_back({alphas[i], gap, normalized_loss(lp, res.state.f), res.state.k});
    write_trace(res.trace, lp, c.out_dir / fmt::format("trace_alpha{}.csv", i));
    out.traces.push_back(std::move(res.trace));
  }

  {
    std::ofstream csv(c.out_dir / "sweep.csv");
    if (!csv) throw Error(ErrorCode::kIoError, "cannot write sweep.csv");
    csv << "alpha,relative_gap,terminal_loss,iterations\n";
    for (const auto& r : out.rows) {
      csv << real(r.alpha) << ',' << real(r.relative_gap) << ',' << real(r.terminal_loss) << ',' << r.iterations
          << '\n';
    }
  }
  const auto table = read_csv_columns(c.out_dir / "sweep.csv");
  write_line_plot_svg(c.out_dir / "gap.svg",
                      {fmt::format("relative gap vs alpha (oracle: {})", out.oracle), "alpha", "relative gap", true,
                       false},
                      {{"relative gap", table.at("alpha"), table.at("relative_gap")}});
  std::vector<PlotSeries> curves;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    curves.push_back(series_from_csv(c.out_dir / fmt::format("trace_alpha{}.csv", i),
                                     fmt::format("alpha={:g}", alphas[i])));
  }
  write_line_plot_svg(c.out_dir / "loss.svg", {"loss by initialization scale", "iteration", "|r|^2 / |b|^2"},
                      curves);
  log.summary["oracle"] = out.oracle;
  return out;
}

OtRunResult ot_impl(const ExperimentConfig& c, RunLog& log) {
  fs::create_directories(c.out_dir);
  const OtInstance ot = load_ot(c);
  const OtReduction red = reduce_ot(ot);
  const double lambda = c.lambda.value_or(0.5);
  const Vector u0 = initial_point(red.lp, CostScaled{lambda});

  OtRunResult out;
  out.constants = constants_with_fallback(red.lp, u0, log);
  StepsizeRule rule = Constant{out.constants.eta_bar};
  if (c.stepsize && !c.stepsize->eta_bar) rule = c.stepsize->rule;
  if (const auto* k = std::get_if<Constant>(&rule)) out.eta = k->eta;

  const long iters = c.iters.value_or(2'000'000);
  const SolveResult dln = solve_dln(red.lp, u0, rule, options_for(rule, iters, c.tol));
  log.termination("dln", dln.trace.termination);
  out.plan_dln = red.recover(dln.state.x());
  out.dln_iterations = dln.state.k;
  out.dln_final_loss = normalized_loss(red.lp, dln.state.f);

  out.sinkhorn = solve_sinkhorn(ot, lambda, 100000, 1e-13);
  if (!out.sinkhorn.converged) log.notes.push_back("Sinkhorn hit its iteration cap before the marginal tolerance");

  out.plan_oracle = red.recover(solve_entropy_lp(EntropyRegularizedLp::from_lambda(red.lp, lambda)).x);
  out.plan_sinkhorn = out.sinkhorn.plan;
  out.dln_vs_oracle = linf(out.plan_dln, out.plan_oracle);
  out.sinkhorn_vs_oracle = linf(out.plan_sinkhorn, out.plan_oracle);
  out.dln_vs_sinkhorn = linf(out.plan_dln, out.plan_sinkhorn);

  write_matrix_block(out.plan_dln, c.out_dir / "plan_dln.txt");
  write_matrix_block(out.plan_sinkhorn, c.out_dir / "plan_sinkhorn.txt");
  write_matrix_block(out.plan_oracle, c.out_dir / "plan_oracle.txt");
  write_trace(dln.trace, red.lp, c.out_dir / "dln.csv");
  write_pairs(c.out_dir / "comparison.csv",
              {{"dln_vs_oracle_linf", out.dln_vs_oracle},
               {"sinkhorn_vs_oracle_linf", out.sinkhorn_vs_oracle},
               {"dln_vs_sinkhorn_linf", out.dln_vs_sinkhorn},
               {"sinkhorn_row_residual", out.sinkhorn.row_residual},
               {"sinkhorn_col_residual", out.sinkhorn.col_residual},
               {"eta", out.eta},
               {"eta_bar", out.constants.eta_bar},
               {"dln_final_normalized_loss", out.dln_final_loss}});
  log.summary["dln_vs_oracle_linf"] = out.dln_vs_oracle;
  log.summary["sinkhorn_vs_oracle_linf"] = out.sinkhorn_vs_oracle;
  log.summary["dln_vs_sinkhorn_linf"] = out.dln_vs_sinkhorn;
  log.summary["sinkhorn_iterations"] = out.sinkhorn.iterations;
  return out;
}

BpRunResult bp_impl(const ExperimentConfig& c, RunLog& log) {
  fs::create_directories(c.out_dir);
  const LoadedBp loaded = load_bp(c);
  const BasisPursuitReduction red = reduce_basis_pursuit(loaded.instance);
  const double lambda = c.lambda.value_or(0.1);
  const Vector u0 = initial_point(red.lp, CostScaled{lambda});
  const StepsizeRule rule = resolve_rule(c.stepsize.value_or(StepsizeSetting{}), red.lp, u0, log);
  const long iters = c.iters.value_or(20000);
  const SolverOptions opts = options_for(rule, iters, c.tol);

  BpRunResult out;
  const SolveResult dln = solve_dln(red.lp, u0, rule, opts);
  const MirrorSolveResult md = solve_mirror(red.lp, u0.cwiseProduct(u0), rule, opts);
  log.termination("dln", dln.trace.termination);
  log.termination("mirror", md.trace.termination);
  out.beta_dln = red.recover(dln.state.x());
  out.beta_mirror = red.recover(md.state.x_tilde);
  out.beta_oracle = red.recover(solve_entropy_lp(EntropyRegularizedLp::from_lambda(red.lp, lambda)).x);
  out.planted = loaded.planted;
  const VertexOptions vopts;
  if (red.lp.cols() <= vopts.max_columns && binomial(red.lp.cols(), red.lp.rows()) <= vopts.max_subsets) {
    out.beta_vertex = red.recover(lp_vertex_oracle(red.lp, vopts).x_star);
  } else {
    log.notes.push_back("vertex oracle skipped: reduced LP too large to enumerate");
  }
  out.dln_vs_oracle = linf(out.beta_dln, out.beta_oracle);
  out.mirror_vs_oracle = linf(out.beta_mirror, out.beta_oracle);

  const Vector none = Vector::Constant(red.p, kNaN);
  write_columns(c.out_dir / "estimate.csv", {"dln", "mirror", "oracle", "vertex", "planted"},
                {out.beta_dln, out.beta_mirror, out.beta_oracle, out.beta_vertex.value_or(none),
                 out.planted.value_or(none)});
  write_trace(dln.trace, red.lp, c.out_dir / "dln.csv");
  write_trace(md.trace, red.lp, c.out_dir / "md.csv");
  std::vector<std::pair<std::string, double>> rows = {{"dln_vs_oracle_linf", out.dln_vs_oracle},
                                                      {"mirror_vs_oracle_linf", out.mirror_vs_oracle}};
  if (out.beta_vertex) rows.emplace_back("oracle_vs_vertex_linf", linf(out.beta_oracle, *out.beta_vertex));
  write_pairs(c.out_dir / "comparison.csv", rows);
  log.summary["dln_vs_oracle_linf"] = out.dln_vs_oracle;
  log.summary["mirror_vs_oracle_linf"] = out.mirror_vs_oracle;
  return out;
}

FlowCheckResult flow_impl(const ExperimentConfig& c, RunLog& log) {
  fs::create_directories(c.out_dir);
  const LinearProgram lp = load_lp(c);
  const Vector u0 = initial_point(lp, init_for(c));
  FlowOptions fo;
  fo.t_end = 1e7;
  fo.residual_tol = c.tol > 0.0 ? c.tol : 1e-10;

  FlowCheckResult out;
  out.flow = integrate_flow(lp, u0, fo);
  out.x_oracle = solve_entropy_lp(EntropyRegularizedLp::from_alpha(lp, u0)).x;
  const Vector x_flow = out.flow.u.cwiseProduct(out.flow.u);
  out.distance = (x_flow - out.x_oracle).cwiseAbs().maxCoeff();
  if (out.flow.residual > fo.residual_tol) log.notes.push_back("flow reached t_end before the residual tolerance");

  write_columns(c.out_dir / "flow.csv", {"x_flow", "x_oracle"}, {x_flow, out.x_oracle});
  write_pairs(c.out_dir / "flow_summary.csv", {{"t", out.flow.t},
                                               {"accepted_steps", static_cast<double>(out.flow.accepted)},
                                               {"rejected_steps", static_cast<double>(out.flow.rejected)},
                                               {"residual", out.flow.residual},
                                               {"linf_distance", out.distance}});
  log.summary["linf_distance"] = out.distance;
  log.summary["t"] = out.flow.t;
  return out;
}

ConstantsResult constants_impl(const ExperimentConfig& c, RunLog& log) {
  fs::create_directories(c.out_dir);
  const LinearProgram lp = load_lp(c);
  const Vector u0 = initial_point(lp, init_for(c));
  const StepsizeRule rule = c.stepsize.value_or(StepsizeSetting{}).eta_bar ? StepsizeRule{Adaptive{}}
                                                                             : c.stepsize.value_or(StepsizeSetting{}).rule;
  ConstantsResult out;
  out.constants = constants_with_fallback(lp, u0, log);
  const long iters = c.iters.value_or(5000);

  SolverState s = SolverState::at(lp, u0);
  out.max_u_norm_sq = s.u.squaredNorm();
  while (s.k < iters && s.f > c.tol) {
    s = dln_step(lp, s, stepsize_for(rule, lp, s));
    out.max_u_norm_sq = std::max(out.max_u_norm_sq, s.u.squaredNorm());
  }
  out.iterations = s.k;
  out.bounded = out.max_u_norm_sq <= out.constants.r_squared;

  write_pairs(c.out_dir / "constants.csv",
              {{"r_squared", out.constants.r_squared},
               {"eta_bar", out.constants.eta_bar},
               {"max_inverse_norm", out.constants.max_inverse_norm},
               {"op_norm", out.constants.op_norm},
               {"submatrix_count", static_cast<double>(out.constants.submatrix_count)},
               {"heuristic", out.constants.heuristic ? 1.0 : 0.0},
               {"max_u_norm_sq", out.max_u_norm_sq},
               {"iterations", static_cast<double>(out.iterations)},
               {"bounded", out.bounded ? 1.0 : 0.0}});
  log.summary["r_squared"] = out.constants.r_squared;
  log.summary["eta_bar"] = out.constants.eta_bar;
  log.summary["max_u_norm_sq"] = out.max_u_norm_sq;
  log.summary["bounded"] = out.bounded;
  return out;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  if (c.instance_file) j["instance_file"] = c.instance_file->string();
  const auto g = c.gen.value_or(default_gen(c));
  if (!c.instance_file) j["gen"] = {{"m", g.m}, {"n", g.n}, {"seed", g.rng_seed}};
  j["alphas"] = c.alphas;
  if (c.lambda) j["lambda"] = *c.lambda;
  j["stepsize"] = c.stepsize ? describe(*c.stepsize) : std::string("default");
  if (c.iters) j["iters"] = *c.iters;
  j["tol"] = c.tol;
  j["paper_scale"] = c.paper_scale;
  return j;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kSolve: return "solve";
    case Experiment::kCompareMd: return "compare-md";
    case Experiment::kSweepInit: return "sweep-init";
    case Experiment::kOt: return "ot";
    case Experiment::kBp: return "bp";
    case Experiment::kFlowCheck: return "flow-check";
    case Experiment::kConstants: return "constants";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (auto e : {Experiment::kSolve, Experiment::kCompareMd, Experiment::kSweepInit, Experiment::kOt, Experiment::kBp,
                 Experiment::kFlowCheck, Experiment::kConstants}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

StepsizeSetting parse_stepsize(const std::string& text) {
  StepsizeSetting s;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "etabar" && arg.empty()) {
    s.eta_bar = true;
  } else if (head == "adaptive") {
    s.rule = Adaptive{arg.empty() ? 1.0 : parse_real(arg, "adaptive safety")};
  } else if (head == "const" && !arg.empty()) {
    s.rule = Constant{parse_real(arg, "constant stepsize")};
  } else if (head == "scaled" && !arg.empty()) {
    s.rule = ScaledAdaptive{parse_real(arg, "scale factor")};
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("unknown stepsize '{}'; expected adaptive, const:ETA, scaled:F or etabar", text));
  }
  if (!s.eta_bar) validate(s.rule);
  return s;
}

std::string describe(const StepsizeSetting& s) { return s.eta_bar ? "etabar" : describe(s.rule); }

void ExperimentConfig::validate() const {
  if (instance_file && gen) throw Error(ErrorCode::kInvalidArgument, "give either an instance file or --gen, not both");
  if (gen) gen->validate();
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::kInvalidArgument, "alpha values must be positive");
  }
  if (lambda && (!(*lambda > 0.0) || !std::isfinite(*lambda))) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  }
  if (iters && *iters < 0) throw Error(ErrorCode::kInvalidArgument, "iteration budget must be nonnegative");
  if (!(tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be nonnegative");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorCode::kInvalidArgument, "output directory not writable: " + out_dir.string());
  }
  const fs::path probe = out_dir / ".write_probe";
  {
    std::ofstream p(probe);
    if (!p) throw Error(ErrorCode::kInvalidArgument, "output directory not writable: " + out_dir.string());
  }
  fs::remove(probe, ec);
}

double relative_gap(const Vector& x_hat, const Vector& x_star) {
  if (x_hat.size() != x_star.size()) throw Error(ErrorCode::kDimensionMismatch, "relative gap: size mismatch");
  return (x_hat.sum() - x_star.sum()) / std::max(1.0, x_star.sum());
}

double normalized_loss(const LinearProgram& lp, double f) {
  const double bb = lp.b().squaredNorm();
  return bb > 0.0 ? 2.0 * f / bb : 2.0 * f;
}

LinearProgram load_lp(const ExperimentConfig& config) {
  if (config.instance_file) return read_lp(*config.instance_file);
  return gen_instance(config.gen.value_or(default_gen(config))).lp;
}

SolveResult run_solve(const ExperimentConfig& config) {
  RunLog log;
  return solve_impl(config, log);
}
CompareMdResult run_compare_md(const ExperimentConfig& config) {
  RunLog log;
  return compare_impl(config, log);
}
SweepResult run_sweep_init(const ExperimentConfig& config) {
  RunLog log;
  return sweep_impl(config, log);
}
OtRunResult run_ot(const ExperimentConfig& config) {
  RunLog log;
  return ot_impl(config, log);
}
BpRunResult run_bp(const ExperimentConfig& config) {
  RunLog log;
  return bp_impl(config, log);
}
FlowCheckResult run_flow_check(const ExperimentConfig& config) {
  RunLog log;
  return flow_impl(config, log);
}
ConstantsResult run_constants(const ExperimentConfig& config) {
  RunLog log;
  return constants_impl(config, log);
}

int run_experiment(const ExperimentConfig& config) {
  try {
    config.validate();
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }

  json manifest;
  manifest["software"] = {{"dlnlp", kVersion},
                          {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                                EIGEN_MINOR_VERSION)},
                          {"compiler", __VERSION__}};
  manifest["config"] = config_json(config);
  manifest["rng"] = "mt19937_64; uniform = (next >> 11) * 2^-53; normal = Box-Muller cosine branch";

  RunLog log;
  int code = 0;
  try {
    switch (config.experiment) {
      case Experiment::kSolve: solve_impl(config, log); break;
      case Experiment::kCompareMd: compare_impl(config, log); break;
      case Experiment::kSweepInit: sweep_impl(config, log); break;
      case Experiment::kOt: ot_impl(config, log); break;
      case Experiment::kBp: bp_impl(config, log); break;
      case Experiment::kFlowCheck: flow_impl(config, log); break;
      case Experiment::kConstants: constants_impl(config, log); break;
    }
    manifest["status"] = log.diagnostic ? "diagnostic" : "ok";
    code = log.diagnostic ? 2 : 0;
  } catch (const Error& e) {
    const bool input = e.code() == ErrorCode::kParseError || e.code() == ErrorCode::kIoError ||
                       e.code() == ErrorCode::kInvalidArgument;
    manifest["status"] = input ? "input_error" : "solver_error";
    manifest["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    fmt::print(stderr, "error: {}\n", e.what());
    code = input ? 1 : 2;
  }
  manifest["terminations"] = log.terminations;
  manifest["notes"] = log.notes;
  manifest["summary"] = log.summary;

  std::ofstream out(config.out_dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  for (const auto& note : log.notes) fmt::print(stderr, "note: {}\n", note);
  for (const auto& [key, value] : log.summary.items()) fmt::print("{} = {}\n", key, value.dump());
  return code;
}

}  // namespace dlnlp

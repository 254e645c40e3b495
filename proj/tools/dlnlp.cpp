// dlnlp: experiment harness for the reparametrized LP solver.

#include "dlnlp/bench.hpp"
#include "dlnlp/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <sstream>

namespace {

const char* summary(dlnlp::Experiment e) {
  using dlnlp::Experiment;
  switch (e) {
    case Experiment::kSolve: return "run DLN on one LP and plot its loss";
    case Experiment::kCompareMd: return "DLN against mirror descent on the same LP";
    case Experiment::kSweepInit: return "relative gap and terminal loss across initialization scales";
    case Experiment::kOt: return "optimal transport: DLN, Sinkhorn and the entropy oracle";
    case Experiment::kBp: return "basis pursuit: DLN, mirror descent and the l1 oracles";
    case Experiment::kFlowCheck: return "integrate the gradient flow and compare with the entropy oracle";
    case Experiment::kConstants: return "bound constants and observed iterate growth";
  }
  return "";
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  for (std::string part; std::getline(in, part, sep);) parts.push_back(part);
  return parts;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dlnlp;
  CLI::App app{"Reparametrized gradient descent for linear programs: experiments and checks"};
  app.require_subcommand(1, 1);

  std::string instance, gen, alphas, stepsize, out = "out";
  double lambda = 0.0, tol = 0.0;
  long iters = -1;
  bool paper_scale = false;

  for (auto e : {Experiment::kSolve, Experiment::kCompareMd, Experiment::kSweepInit, Experiment::kOt, Experiment::kBp,
                 Experiment::kFlowCheck, Experiment::kConstants}) {
    auto* sub = app.add_subcommand(to_string(e), summary(e));
    auto* inst = sub->add_option("--instance", instance, "instance file (lp, ot or bp format)");
    sub->add_option("--gen", gen, "generate an instance: m,n,seed")->excludes(inst);
    sub->add_option("--alpha", alphas, "initialization scale(s), comma separated");
    sub->add_option("--lambda", lambda, "entropy weight; selects the cost-scaled initialization");
    sub->add_option("--stepsize", stepsize, "adaptive[:SAFETY] | const:ETA | scaled:F | etabar");
    sub->add_option("--iters", iters, "iteration budget");
    sub->add_option("--tol", tol, "stop once the loss falls below this");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_flag("--paper-scale", paper_scale, "300 x 3000 instances for compare-md and sweep-init");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ExperimentConfig config;
  try {
    config.experiment = *parse_experiment(app.get_subcommands().front()->get_name());
    if (!instance.empty()) config.instance_file = instance;
    if (!gen.empty()) {
      const auto parts = split(gen, ',');
      if (parts.size() != 3) throw std::invalid_argument("--gen expects m,n,seed");
      config.gen = InstanceSeedSpec{std::stol(parts[0]), std::stol(parts[1]), std::stoull(parts[2])};
    }
    if (!alphas.empty()) {
      for (const auto& a : split(alphas, ',')) config.alphas.push_back(to_double(a));
    }
    if (lambda != 0.0) config.lambda = lambda;
    if (!stepsize.empty()) config.stepsize = parse_stepsize(stepsize);
    if (iters >= 0) config.iters = iters;
    config.tol = tol;
    config.out_dir = out;
    config.paper_scale = paper_scale;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return run_experiment(config);
}

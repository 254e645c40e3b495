#include "dlnlp/lp_core.hpp"

#include "dlnlp/dln_solver.hpp"
#include "dlnlp/error.hpp"
#include "text_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <string>

namespace dlnlp {

namespace {

bool all_finite(const auto& m) { return m.allFinite(); }

void check_lp_data(const Matrix& a, const Vector& b, const Vector& c) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "A must have at least one row and one column");
  }
  if (b.size() != a.rows() || c.size() != a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("A is {}x{} but b has {} and c has {} entries", a.rows(), a.cols(),
                            b.size(), c.size()));
  }
  if (a.rows() > a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("need m <= n, got m={} n={}", a.rows(), a.cols()));
  }
  if (!all_finite(a) || !all_finite(b) || !all_finite(c)) {
    throw Error(ErrorCode::kNonFiniteData, "LP data contains NaN or Inf");
  }
  for (Index j = 0; j < c.size(); ++j) {
    if (!(c(j) > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("cost c[{}] = {} must be strictly positive", j, c(j)));
    }
  }
}

}  // namespace

LinearProgram::LinearProgram(Matrix a, Vector b, Vector c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  check_lp_data(a_, b_, c_);
  lipschitz_ = operator_norm_squared(a_);
}

double operator_norm_squared(const Matrix& a, double rel_tol, int max_iters) {
  const Matrix gram = a * a.transpose();
  if (gram.rows() == 1) return gram(0, 0);
  Rng rng(0x9e3779b97f4a7c15ULL);
  Vector v(gram.rows());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  v.normalize();
  double estimate = 0.0;
  Vector w(gram.rows());
  for (int it = 0; it < max_iters; ++it) {
    w.noalias() = gram * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - estimate) <= rel_tol * std::abs(next)) return next;
    estimate = next;
  }
  return estimate;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void InstanceSeedSpec::validate() const {
  if (m < 1 || n < 1 || m > n) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("instance spec needs 1 <= m <= n, got m={} n={}", m, n));
  }
}

GeneratedInstance gen_instance(const InstanceSeedSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  Matrix a(spec.m, spec.n);
  for (Index i = 0; i < spec.m; ++i) {
    for (Index j = 0; j < spec.n; ++j) a(i, j) = rng.normal();
  }
  Vector planted(spec.n);
  for (Index j = 0; j < spec.n; ++j) planted(j) = rng.uniform();
  Vector b = a * planted;
  return {LinearProgram(std::move(a), std::move(b), Vector::Ones(spec.n)), std::move(planted)};
}

FeasibilityCheckReport validate_lp(const LinearProgram& lp, const ValidateOptions& options) {
  const Matrix& a = lp.a();
  if (!a.allFinite() || !lp.b().allFinite() || !lp.c().allFinite()) {
    throw Error(ErrorCode::kNonFiniteData, "LP data contains NaN or Inf");
  }
  FeasibilityCheckReport report;
  Eigen::JacobiSVD<Matrix> svd(a);
  report.singular_values = svd.singularValues();
  const double smax = report.singular_values.size() > 0 ? report.singular_values(0) : 0.0;
  report.row_rank_estimate = 0;
  for (Index i = 0; i < report.singular_values.size(); ++i) {
    if (report.singular_values(i) > options.rank_tol * smax) ++report.row_rank_estimate;
  }
  report.is_full_row_rank = report.row_rank_estimate == lp.rows();

  // Interior probe: a short adaptive descent from u = 1 stays strictly
  // positive, so a small final residual certifies a strictly feasible point.
  report.witness_tolerance = options.witness_tol * std::max(1.0, lp.b().norm());
  SolverOptions probe;
  probe.max_iters = options.witness_iters;
  probe.loss_tol = 0.5 * std::pow(1e-14 * std::max(1.0, lp.b().norm()), 2);
  probe.snapshot_stride = -1;
  probe.record_stride = options.witness_iters;
  const auto run = solve_dln(lp, Vector::Ones(lp.cols()), Adaptive{}, probe);
  const Vector x = run.state.x();
  report.residual_of_witness = (lp.a() * x - lp.b()).norm();
  if (run.trace.termination != TerminationReason::kNonFinite && x.minCoeff() > 0.0 &&
      report.residual_of_witness <= report.witness_tolerance) {
    report.strictly_feasible_witness = x;
  }
  return report;
}

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

LinearProgram parse_lp(std::istream& in) {
  text_io::LineSource src(in);
  auto [m, n] = src.header("lp");
  if (m > n) src.fail(fmt::format("header declares m={} > n={}; need m <= n", m, n));
  Matrix a = src.matrix(m, n, "row of A");
  Vector b = src.row(m, "b");
  Vector c = src.row(n, "c");
  for (Index j = 0; j < n; ++j) {
    if (!(c(j) > 0.0)) src.fail(fmt::format("cost c[{}] = {} violates positivity", j, c(j)));
  }
  try {
    return LinearProgram(std::move(a), std::move(b), std::move(c));
  } catch (const Error& e) {
    src.fail(e.what());
  }
}

LinearProgram read_lp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_lp(in);
}

void write_lp(const LinearProgram& lp, std::ostream& out) {
  out << "lp " << lp.rows() << ' ' << lp.cols() << '\n';
  text_io::write_matrix(out, lp.a());
  text_io::write_row(out, lp.b());
  text_io::write_row(out, lp.c());
}

void write_lp(const LinearProgram& lp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_lp(lp, out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace dlnlp

#include "dlnlp/reductions.hpp"

#include "dlnlp/error.hpp"
#include "text_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <vector>

namespace dlnlp {

BasisPursuitInstance::BasisPursuitInstance(Matrix x_data, Vector y) : x_data_(std::move(x_data)), y_(std::move(y)) {
  if (x_data_.rows() < 1 || x_data_.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "X must be non-empty");
  }
  if (y_.size() != x_data_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("X has {} rows but y has {} entries", x_data_.rows(), y_.size()));
  }
  if (!x_data_.allFinite() || !y_.allFinite()) throw Error(ErrorCode::kNonFiniteData, "X or y not finite");
}

OtInstance::OtInstance(Matrix cost, Vector row_marginal, Vector col_marginal)
    : cost_(std::move(cost)), row_marginal_(std::move(row_marginal)), col_marginal_(std::move(col_marginal)) {
  if (cost_.rows() < 1 || cost_.cols() < 1 || row_marginal_.size() != cost_.rows() ||
      col_marginal_.size() != cost_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("cost is {}x{} with marginals of length {} and {}", cost_.rows(), cost_.cols(),
                            row_marginal_.size(), col_marginal_.size()));
  }
  if (!cost_.allFinite() || !row_marginal_.allFinite() || !col_marginal_.allFinite()) {
    throw Error(ErrorCode::kNonFiniteData, "OT data not finite");
  }
  if (!(cost_.minCoeff() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "OT cost must be strictly positive");
  if (row_marginal_.minCoeff() < 0.0 || col_marginal_.minCoeff() < 0.0) {
    throw Error(ErrorCode::kMarginalMismatch, "marginals must be nonnegative");
  }
  const double row_sum = row_marginal_.sum();
  const double col_sum = col_marginal_.sum();
  if (std::abs(row_sum - 1.0) > kMarginalTol || std::abs(col_sum - 1.0) > kMarginalTol) {
    throw Error(ErrorCode::kMarginalMismatch,
                fmt::format("marginals must each sum to 1 (got {:.17g} and {:.17g})", row_sum, col_sum));
  }
}

Vector BasisPursuitReduction::recover(const Vector& x) const {
  if (x.size() != 2 * p) throw Error(ErrorCode::kDimensionMismatch, "expected x of length 2p");
  return x.head(p) - x.tail(p);
}

Matrix OtReduction::recover(const Vector& x) const {
  if (x.size() != rows * cols) throw Error(ErrorCode::kDimensionMismatch, "expected x of length rows*cols");
  Matrix plan(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) plan(i, j) = x(i * cols + j);
  }
  return plan;
}

Vector GeneralLpReduction::recover(const Vector& x) const {
  if (x.size() != n + 1) throw Error(ErrorCode::kDimensionMismatch, "expected x of length n+1");
  return x.head(n);
}

BasisPursuitReduction reduce_basis_pursuit(const BasisPursuitInstance& bp) {
  const Index samples = bp.x_data().rows();
  const Index p = bp.x_data().cols();
  Matrix a(samples, 2 * p);
  a << bp.x_data(), -bp.x_data();
  return {LinearProgram(std::move(a), bp.y(), Vector::Ones(2 * p)), p};
}

OtReduction reduce_ot(const OtInstance& ot) {
  const Index rows = ot.rows();
  const Index cols = ot.cols();
  const Index constraints = rows + cols - 1;
  Matrix a = Matrix::Zero(constraints, rows * cols);
  Vector b(constraints);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, i * cols + j) = 1.0;
    b(i) = ot.row_marginal()(i);
  }
  for (Index j = 0; j + 1 < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(rows + j, i * cols + j) = 1.0;
    b(rows + j) = ot.col_marginal()(j);
  }
  Vector c(rows * cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) c(i * cols + j) = ot.cost()(i, j);
  }
  return {LinearProgram(std::move(a), std::move(b), std::move(c)), rows, cols};
}

GeneralLpReduction reduce_general_lp(const GeneralLp& g) {
  const Index m = g.a_tilde.rows();
  const Index n = g.a_tilde.cols();
  if (g.b_tilde.size() != m || g.c_tilde.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "general LP dimensions disagree");
  }
  if (!(g.big_m > 0.0) || !(g.shift_lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "big_m and shift_lambda must be positive");
  }
  const Vector shifted = g.c_tilde.array() + g.shift_lambda;
  for (Index j = 0; j < n; ++j) {
    if (!(shifted(j) > 0.0)) {
      throw Error(ErrorCode::kShiftTooSmall,
                  fmt::format("c~[{}] + lambda = {} is not positive", j, shifted(j)));
    }
  }
  Matrix a = Matrix::Zero(m + 1, n + 1);
  a.topLeftCorner(m, n) = g.a_tilde;
  a.row(m).setOnes();
  Vector b(m + 1);
  b << g.b_tilde, g.big_m;
  Vector c(n + 1);
  c << shifted, g.shift_lambda;
  return {LinearProgram(std::move(a), std::move(b), std::move(c)), n, g.big_m, g.shift_lambda};
}

OtInstance parse_ot(std::istream& in) {
  text_io::LineSource src(in);
  auto [rows, cols] = src.header("ot");
  Matrix cost = src.matrix(rows, cols, "cost row");
  Vector w = src.row(rows, "row marginal");
  Vector v = src.row(cols, "column marginal");
  try {
    return OtInstance(std::move(cost), std::move(w), std::move(v));
  } catch (const Error& e) {
    src.fail(e.what());
  }
}

OtInstance read_ot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_ot(in);
}

void write_ot(const OtInstance& ot, std::ostream& out) {
  out << "ot " << ot.rows() << ' ' << ot.cols() << '\n';
  text_io::write_matrix(out, ot.cost());
  text_io::write_row(out, ot.row_marginal());
  text_io::write_row(out, ot.col_marginal());
}

void write_ot(const OtInstance& ot, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_ot(ot, out);
}

BasisPursuitInstance parse_bp(std::istream& in) {
  text_io::LineSource src(in);
  auto [samples, p] = src.header("bp");
  Matrix x = src.matrix(samples, p, "row of X");
  Vector y = src.row(samples, "y");
  try {
    return BasisPursuitInstance(std::move(x), std::move(y));
  } catch (const Error& e) {
    src.fail(e.what());
  }
}

BasisPursuitInstance read_bp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_bp(in);
}

void write_bp(const BasisPursuitInstance& bp, std::ostream& out) {
  out << "bp " << bp.x_data().rows() << ' ' << bp.x_data().cols() << '\n';
  text_io::write_matrix(out, bp.x_data());
  text_io::write_row(out, bp.y());
}

void write_bp(const BasisPursuitInstance& bp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_bp(bp, out);
}

void write_matrix_block(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  text_io::write_matrix(out, m);
}

OtInstance gen_ot_instance(Index rows, Index cols, std::uint64_t seed, double cost_lo, double cost_hi) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::kInvalidArgument, "OT sizes must be positive");
  if (!(cost_lo > 0.0) || !(cost_hi >= cost_lo)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < cost_lo <= cost_hi");
  }
  Rng rng(seed);
  Matrix cost(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) cost(i, j) = rng.uniform(cost_lo, cost_hi);
  }
  auto weights = [&](Index len) {
    Vector w(len);
    for (Index i = 0; i < len; ++i) w(i) = 0.5 + rng.uniform();
    return Vector(w / w.sum());
  };
  Vector w = weights(rows);
  Vector v = weights(cols);
  return OtInstance(std::move(cost), std::move(w), std::move(v));
}

GeneratedBasisPursuit gen_bp_instance(Index samples, Index p, Index sparsity, std::uint64_t seed) {
  if (samples < 1 || p < 1 || sparsity < 0 || sparsity > p) {
    throw Error(ErrorCode::kInvalidArgument, "need samples >= 1, p >= 1, 0 <= sparsity <= p");
  }
  Rng rng(seed);
  Matrix x(samples, p);
  for (Index i = 0; i < samples; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = rng.normal();
  }
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  // Fisher-Yates with the portable generator.
  for (Index i = p - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.below(i + 1))]);
  Vector beta = Vector::Zero(p);
  for (Index s = 0; s < sparsity; ++s) {
    const double magnitude = rng.uniform(1.0, 2.0);
    beta(order[static_cast<std::size_t>(s)]) = rng.uniform() < 0.5 ? -magnitude : magnitude;
  }
  Vector y = x * beta;
  return {BasisPursuitInstance(std::move(x), std::move(y)), std::move(beta)};
}

}  // namespace dlnlp

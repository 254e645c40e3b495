#pragma once

#include "dlnlp/lp_core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace dlnlp {

// min ||beta||_1  s.t.  X beta = y
class BasisPursuitInstance {
 public:
  BasisPursuitInstance(Matrix x_data, Vector y);

  const Matrix& x_data() const noexcept { return x_data_; }
  const Vector& y() const noexcept { return y_; }

 private:
  Matrix x_data_;
  Vector y_;
};

// Optimal transport between row_marginal (length rows) and col_marginal
// (length cols) under a strictly positive cost matrix.
class OtInstance {
 public:
  static constexpr double kMarginalTol = 1e-12;

  OtInstance(Matrix cost, Vector row_marginal, Vector col_marginal);

  const Matrix& cost() const noexcept { return cost_; }
  const Vector& row_marginal() const noexcept { return row_marginal_; }
  const Vector& col_marginal() const noexcept { return col_marginal_; }
  Index rows() const noexcept { return cost_.rows(); }
  Index cols() const noexcept { return cost_.cols(); }

 private:
  Matrix cost_;
  Vector row_marginal_;
  Vector col_marginal_;
};

// min c~'z  s.t.  A~z = b~, z >= 0, with c~ of any sign. big_m bounds 1'z*
// for some optimum z*; shift_lambda makes c~ + lambda 1 positive.
struct GeneralLp {
  Matrix a_tilde;
  Vector b_tilde;
  Vector c_tilde;
  double big_m = 1.0;
  double shift_lambda = 1.0;
};

struct BasisPursuitReduction {
  LinearProgram lp;
  Index p = 0;

  // beta = w - z for x = (w; z).
  Vector recover(const Vector& x) const;
};

struct OtReduction {
  LinearProgram lp;
  Index rows = 0;
  Index cols = 0;

  // Row-major reshape of x into a rows x cols plan.
  Matrix recover(const Vector& x) const;
};

struct GeneralLpReduction {
  LinearProgram lp;
  Index n = 0;
  double big_m = 0.0;
  double shift_lambda = 0.0;

  // Drops the slack coordinate t.
  Vector recover(const Vector& x) const;
  // c~'z* = c'x* - lambda M.
  double original_value(double reduced_value) const { return reduced_value - shift_lambda * big_m; }
};

// A = [X, -X], b = y, c = 1.
BasisPursuitReduction reduce_basis_pursuit(const BasisPursuitInstance& bp);

// x = vec(X) row-major; rows constraints (row sums) followed by the column
// sums of all but the last column, which is implied by the others.
OtReduction reduce_ot(const OtInstance& ot);

// A = [[A~, 0], [1', 1]], b = (b~; M), c = (c~ + lambda 1; lambda).
GeneralLpReduction reduce_general_lp(const GeneralLp& g);

// Text formats sharing the LP file conventions:
//   "ot <rows> <cols>", cost rows, row marginal, column marginal
//   "bp <samples> <p>", rows of X, y
OtInstance read_ot(const std::filesystem::path& path);
OtInstance parse_ot(std::istream& in);
void write_ot(const OtInstance& ot, const std::filesystem::path& path);
void write_ot(const OtInstance& ot, std::ostream& out);

BasisPursuitInstance read_bp(const std::filesystem::path& path);
BasisPursuitInstance parse_bp(std::istream& in);
void write_bp(const BasisPursuitInstance& bp, const std::filesystem::path& path);
void write_bp(const BasisPursuitInstance& bp, std::ostream& out);

// Writes a matrix block (one row per line) as used for plan exports.
void write_matrix_block(const Matrix& m, const std::filesystem::path& path);

// Cost uniform on [cost_lo, cost_hi), marginals uniform weights normalized.
OtInstance gen_ot_instance(Index rows, Index cols, std::uint64_t seed, double cost_lo = 1.0, double cost_hi = 2.0);

struct GeneratedBasisPursuit {
  BasisPursuitInstance instance;
  Vector planted_beta;
};

// Gaussian X; beta has `sparsity` nonzeros of magnitude in [1, 2) with random signs.
GeneratedBasisPursuit gen_bp_instance(Index samples, Index p, Index sparsity, std::uint64_t seed);

}  // namespace dlnlp

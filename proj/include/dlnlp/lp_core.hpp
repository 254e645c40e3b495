#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>

namespace dlnlp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Standard-form LP  min c'x  s.t.  Ax = b, x >= 0  with strictly positive
// costs. Construction validates every invariant, so a LinearProgram value is
// always well formed; it is immutable afterwards.
class LinearProgram {
 public:
  LinearProgram(Matrix a, Vector b, Vector c);

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  const Vector& c() const noexcept { return c_; }
  Index rows() const noexcept { return a_.rows(); }
  Index cols() const noexcept { return a_.cols(); }

  // ||A||_2^2, estimated once at construction by power iteration on AA'.
  double lipschitz() const noexcept { return lipschitz_; }

  friend bool operator==(const LinearProgram& lhs, const LinearProgram& rhs) {
    return lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_ && lhs.c_ == rhs.c_;
  }

 private:
  Matrix a_;
  Vector b_;
  Vector c_;
  double lipschitz_ = 0.0;
};

// Largest eigenvalue of AA' by power iteration from a fixed-seed start,
// stopping when the Rayleigh quotient changes by less than rel_tol.
double operator_norm_squared(const Matrix& a, double rel_tol = 1e-10, int max_iters = 10000);

struct FeasibilityCheckReport {
  Index row_rank_estimate = 0;
  bool is_full_row_rank = false;
  std::optional<Vector> strictly_feasible_witness;
  double residual_of_witness = 0.0;
  double witness_tolerance = 0.0;
  Vector singular_values;
};

struct ValidateOptions {
  double rank_tol = 1e-8;        // relative to the largest singular value
  double witness_tol = 1e-6;     // on ||Ax - b||_2, relative to max(1, ||b||_2)
  long witness_iters = 2000;
};

FeasibilityCheckReport validate_lp(const LinearProgram& lp, const ValidateOptions& options = {});

struct InstanceSeedSpec {
  Index m = 1;
  Index n = 1;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct GeneratedInstance {
  LinearProgram lp;
  Vector planted_x;
};

// Portable random source: std::mt19937_64 (bit-exact across standard
// libraries) with hand-written uniform and normal transforms. The standard
// distributions are implementation-defined and are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // 53 high bits scaled into [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Box-Muller, cosine branch only: u1 = 1 - uniform() in (0, 1], u2 = uniform().
  double normal();
  Index below(Index bound) { return static_cast<Index>(engine_() % static_cast<std::uint64_t>(bound)); }

 private:
  std::mt19937_64 engine_;
};

// A is filled row by row with standard normals, then planted_x with
// uniforms on [0, 1); b = A * planted_x and c = 1.
GeneratedInstance gen_instance(const InstanceSeedSpec& spec);

// Text format: "lp m n", m rows of A, b, c. '#' lines are comments.
LinearProgram read_lp(const std::filesystem::path& path);
LinearProgram parse_lp(std::istream& in);
void write_lp(const LinearProgram& lp, const std::filesystem::path& path);
void write_lp(const LinearProgram& lp, std::ostream& out);

// Shortest round-trippable decimal with 17 significant digits.
std::string format_real(double value);


}  // namespace dlnlp

#include "dlnlp/error.hpp"
#include "dlnlp/lp_core.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace dlnlp;
using namespace dlnlp::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

LinearProgram parse(const std::string& text) {
  std::istringstream in(text);
  return parse_lp(in);
}

}  // namespace

TEST_CASE("LinearProgram enforces its invariants") {
  CHECK(code_of([] { LinearProgram(mat({{1, 1}}), vec({1}), vec({1, 0})); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { LinearProgram(mat({{1}, {1}}), vec({1, 1}), vec({1})); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { LinearProgram(mat({{1, 1}}), vec({1, 2}), vec({1, 1})); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { LinearProgram(mat({{1, NAN}}), vec({1}), vec({1, 1})); }) == ErrorCode::kNonFiniteData);
  CHECK(code_of([] { LinearProgram(mat({{1, 1}}), vec({INFINITY}), vec({1, 1})); }) == ErrorCode::kNonFiniteData);
}

TEST_CASE("operator norm by power iteration") {
  CHECK(lp1(3, 1).lipschitz() == doctest::Approx(9.0).epsilon(1e-12));
  const auto g = gen_instance({6, 15, 3});
  Eigen::JacobiSVD<Matrix> svd(g.lp.a());
  const double s = svd.singularValues()(0);
  CHECK(g.lp.lipschitz() == doctest::Approx(s * s).epsilon(1e-9));
}

TEST_CASE("validate_lp on a symmetric feasible instance") {
  const LinearProgram lp(mat({{1, 1}}), vec({1}), vec({1, 1}));
  const auto rep = validate_lp(lp);
  CHECK(rep.is_full_row_rank);
  CHECK(rep.row_rank_estimate == 1);
  REQUIRE(rep.strictly_feasible_witness);
  CHECK((*rep.strictly_feasible_witness)(0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK((*rep.strictly_feasible_witness)(1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.residual_of_witness <= 1e-10);
}

TEST_CASE("validate_lp detects a duplicated row") {
  const LinearProgram lp(mat({{1, 1}, {2, 2}}), vec({1, 2}), vec({1, 1}));
  const auto rep = validate_lp(lp);
  CHECK(rep.row_rank_estimate == 1);
  CHECK_FALSE(rep.is_full_row_rank);
}

TEST_CASE("validate_lp on a generated instance matches an independent SVD rank") {
  const auto g = gen_instance({5, 20, 7});
  const auto rep = validate_lp(g.lp);
  Eigen::BDCSVD<Matrix> svd(g.lp.a());
  const Vector sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-8 * sv(0) ? 1 : 0;
  CHECK(rank == 5);
  CHECK(rep.row_rank_estimate == rank);
  CHECK(rep.is_full_row_rank);
  if (rep.strictly_feasible_witness) {
    CHECK(rep.strictly_feasible_witness->minCoeff() > 0.0);
    CHECK(rep.residual_of_witness <= rep.witness_tolerance);
  }
}

TEST_CASE("Rng matches the std::mt19937_64 reference sequence") {
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  CHECK(v == 9981545732273789042ULL);

  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
  }
  Rng c(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = c.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("gen_instance") {
  SUBCASE("1x1 gives b = a * x exactly") {
    for (std::uint64_t s : {0ULL, 1ULL, 99ULL}) {
      const auto g = gen_instance({1, 1, s});
      CHECK(g.lp.b()(0) == g.lp.a()(0, 0) * g.planted_x(0));
    }
  }
  SUBCASE("300x3000 dimensions") {
    const auto g = gen_instance({300, 3000, 5});
    CHECK(g.lp.rows() == 300);
    CHECK(g.lp.cols() == 3000);
    CHECK(g.lp.c() == Vector::Ones(3000));
  }
  SUBCASE("deterministic and planted-feasible") {
    const auto g1 = gen_instance({4, 9, 11});
    const auto g2 = gen_instance({4, 9, 11});
    CHECK(g1.lp == g2.lp);
    CHECK(g1.planted_x == g2.planted_x);
    CHECK(g1.lp.b() == g1.lp.a() * g1.planted_x);
    CHECK(g1.planted_x.minCoeff() >= 0.0);
    CHECK(g1.planted_x.maxCoeff() < 1.0);
    CHECK_FALSE(gen_instance({4, 9, 12}).lp == g1.lp);
  }
  SUBCASE("invalid spec") {
    CHECK(code_of([] { gen_instance({3, 2, 0}); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([] { gen_instance({0, 2, 0}); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("LP file round trip is exact") {
  const auto g = gen_instance({3, 7, 21});
  std::stringstream ss;
  write_lp(g.lp, ss);
  CHECK(parse_lp(ss) == g.lp);

  const auto path = std::filesystem::temp_directory_path() / "dlnlp_roundtrip.lp";
  write_lp(g.lp, path);
  CHECK(read_lp(path) == g.lp);
  std::filesystem::remove(path);

  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("LP parser accepts comments and blank lines") {
  const auto lp = parse("# header comment\nlp 1 2\n\n1 +2\n# b\n3\n1 1\n");
  CHECK(lp.a()(0, 1) == 2.0);
  CHECK(lp.b()(0) == 3.0);
}

TEST_CASE("LP parser errors") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParseError);
      return std::string(e.what());
    }
    FAIL("expected ParseError");
    return std::string();
  };
  CHECK(message("lp 1 2\n1 1\n1\n1 0\n").find("positivity") != std::string::npos);
  CHECK(message("lp 2 1\n1\n1\n1 1\n1\n").find("m <= n") != std::string::npos);
  CHECK(message("lp 1 2\n1 x\n1\n1 1\n").find("line 2") != std::string::npos);
  CHECK(message("lp 1 2\n1 1 1\n1\n1 1\n").find("line 2") != std::string::npos);
  CHECK(message("lp 1 2\n1 1\n1\n").find("end of input") != std::string::npos);
  CHECK(message("ot 1 2\n").find("lp") != std::string::npos);
  CHECK(code_of([] { read_lp("/nonexistent/dir/x.lp"); }) == ErrorCode::kIoError);
}

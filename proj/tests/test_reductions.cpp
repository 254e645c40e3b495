#include "dlnlp/error.hpp"
#include "dlnlp/oracles.hpp"
#include "dlnlp/reductions.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace dlnlp;
using namespace dlnlp::testing;

TEST_CASE("basis pursuit reduction layout") {
  const auto red = reduce_basis_pursuit(BasisPursuitInstance(mat({{1, 0}}), vec({1})));
  CHECK(red.lp.a() == mat({{1, 0, -1, 0}}));
  CHECK(red.lp.b() == vec({1}));
  CHECK(red.lp.c() == Vector::Ones(4));
  CHECK(red.recover(vec({1, 0, 0, 0})) == vec({1, 0}));
  CHECK(red.recover(vec({0.5, 2, 1.5, 0})) == vec({-1, 2}));
}

TEST_CASE("basis pursuit: reduced optimum is the minimum l1 exact fit") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix x(3, 6);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 6; ++j) x(i, j) = rng.normal();
    Vector y(3);
    for (Index i = 0; i < 3; ++i) y(i) = rng.normal();
    const auto red = reduce_basis_pursuit(BasisPursuitInstance(x, y));
    const auto sol = lp_vertex_oracle(red.lp);
    const Vector beta = red.recover(sol.x_star);
    CHECK((x * beta - y).norm() <= 1e-10);
    CHECK(beta.lpNorm<1>() == doctest::Approx(sol.value).epsilon(1e-12));

    // Independent check: the l1 minimizer over exact fits sits on a basic
    // solution of X itself (3 nonzeros); enumerate those directly.
    double best = 1e300;
    for (Index a = 0; a < 6; ++a)
      for (Index b = a + 1; b < 6; ++b)
        for (Index c = b + 1; c < 6; ++c) {
          Matrix sub(3, 3);
          sub << x.col(a), x.col(b), x.col(c);
          Eigen::FullPivLU<Matrix> lu(sub);
          if (!lu.isInvertible()) continue;
          best = std::min(best, lu.solve(y).lpNorm<1>());
        }
    CHECK(sol.value == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("basis pursuit objective dominates the l1 norm of w - z") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Vector w(4), z(4);
    for (Index j = 0; j < 4; ++j) w(j) = rng.uniform(), z(j) = rng.uniform();
    CHECK(w.sum() + z.sum() >= (w - z).lpNorm<1>() - 1e-15);
    const Vector wp = (w - z).cwiseMax(0.0), zp = (z - w).cwiseMax(0.0);
    CHECK(wp.sum() + zp.sum() == doctest::Approx((w - z).lpNorm<1>()).epsilon(1e-14));
  }
}

TEST_CASE("OT reduction") {
  SUBCASE("1x1 forced plan") {
    const auto red = reduce_ot(OtInstance(mat({{3}}), vec({1}), vec({1})));
    CHECK(red.lp.a() == mat({{1}}));
    CHECK(red.lp.b() == vec({1}));
    CHECK(red.lp.c() == vec({3}));
    CHECK(red.recover(vec({1})) == mat({{1}}));
  }
  SUBCASE("2x2 uniform, constant cost") {
    const auto red = reduce_ot(OtInstance(mat({{1, 1}, {1, 1}}), vec({0.5, 0.5}), vec({0.5, 0.5})));
    CHECK(red.lp.rows() == 3);
    CHECK((red.lp.a() * Vector::Constant(4, 0.25) - red.lp.b()).norm() == 0.0);
  }
  SUBCASE("2x2 with cheap diagonal") {
    const auto red = reduce_ot(OtInstance(mat({{1, 2}, {2, 1}}), vec({0.5, 0.5}), vec({0.5, 0.5})));
    const auto sol = lp_vertex_oracle(red.lp);
    CHECK(sol.value == doctest::Approx(1.0));
    CHECK(red.recover(sol.x_star).isApprox(mat({{0.5, 0}, {0, 0.5}})));
  }
  SUBCASE("row-major layout, full row rank, plans map to b") {
    const auto ot = gen_ot_instance(3, 4, 9);
    const auto red = reduce_ot(ot);
    CHECK(red.lp.rows() == 3 + 4 - 1);
    CHECK(red.lp.c()(1) == ot.cost()(0, 1));
    CHECK(red.lp.c()(4) == ot.cost()(1, 0));
    Eigen::FullPivLU<Matrix> lu(red.lp.a());
    CHECK(lu.rank() == 6);
    const Matrix plan = ot.row_marginal() * ot.col_marginal().transpose();
    Vector x(12);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 4; ++j) x(i * 4 + j) = plan(i, j);
    CHECK((red.lp.a() * x - red.lp.b()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(red.recover(x) == plan);
  }
}

TEST_CASE("OT instance validation") {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  CHECK(code([] { OtInstance(mat({{1, 1}}), vec({1}), vec({0.5, 0.6})); }) == ErrorCode::kMarginalMismatch);
  CHECK(code([] { OtInstance(mat({{1, 0}}), vec({1}), vec({0.5, 0.5})); }) == ErrorCode::kInvalidArgument);
  CHECK(code([] { OtInstance(mat({{1, 1}}), vec({1, 0}), vec({0.5, 0.5})); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("big-M reduction") {
  SUBCASE("formula substitution") {
    const auto red = reduce_general_lp({mat({{1}}), vec({1}), vec({-1}), 2.0, 2.0});
    CHECK(red.lp.a() == mat({{1, 0}, {1, 1}}));
    CHECK(red.lp.b() == vec({1, 2}));
    CHECK(red.lp.c() == vec({1, 2}));
    CHECK(red.recover(vec({0.7, 1.3})) == vec({0.7}));
  }
  SUBCASE("positive costs") {
    const auto red = reduce_general_lp({mat({{1, 1}}), vec({1}), vec({1, 1}), 5.0, 1.0});
    CHECK(red.lp.c() == vec({2, 2, 1}));
  }
  SUBCASE("shift too small") {
    try {
      reduce_general_lp({mat({{1, 1}}), vec({1}), vec({-1, 1}), 5.0, 1.0});
      FAIL("expected ShiftTooSmall");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kShiftTooSmall);
    }
  }
  SUBCASE("optimal value preserved on a tiny instance") {
    const Matrix a = mat({{1, 2, 1, 0}, {0, 1, 3, 1}});
    const Vector b = vec({2, 3});
    const Vector c = vec({-1, 0.5, -2, 1});
    const auto original = vertex_minimize(a, b, c);
    const auto red = reduce_general_lp({a, b, c, 50.0, 3.0});
    const auto reduced = lp_vertex_oracle(red.lp);
    CHECK(red.original_value(reduced.value) == doctest::Approx(original.value).epsilon(1e-12));
    CHECK(c.dot(red.recover(reduced.x_star)) == doctest::Approx(original.value).epsilon(1e-12));
  }
}

TEST_CASE("OT and BP file round trips") {
  const auto ot = gen_ot_instance(2, 3, 4);
  std::stringstream ss;
  write_ot(ot, ss);
  const auto back = parse_ot(ss);
  CHECK(back.cost() == ot.cost());
  CHECK(back.row_marginal() == ot.row_marginal());
  CHECK(back.col_marginal() == ot.col_marginal());

  const auto bp = gen_bp_instance(3, 5, 2, 8);
  std::stringstream sb;
  write_bp(bp.instance, sb);
  const auto bback = parse_bp(sb);
  CHECK(bback.x_data() == bp.instance.x_data());
  CHECK(bback.y() == bp.instance.y());
  CHECK((bp.planted_beta.array() != 0.0).count() == 2);
  CHECK((bp.instance.x_data() * bp.planted_beta - bp.instance.y()).norm() <= 1e-12);

  std::stringstream bad("ot 1 1\n2\n0.5\n1\n");
  CHECK_THROWS_AS(parse_ot(bad), Error);
}

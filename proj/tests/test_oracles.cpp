#include "dlnlp/dln_solver.hpp"
#include "dlnlp/error.hpp"
#include "dlnlp/oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dlnlp;
using namespace dlnlp::testing;

namespace {

const LinearProgram kSimplex2(mat({{1, 1}}), vec({1}), vec({1, 1}));

}  // namespace

TEST_CASE("entropy oracle closed forms") {
  for (double a : {1e-6, 0.3, 2.0}) {
    const auto sol = solve_entropy_lp(EntropyRegularizedLp::from_alpha(kSimplex2, vec({a, a})));
    CHECK(sol.x(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.x(1) == doctest::Approx(0.5).epsilon(1e-12));
  }
  const double a1 = 0.2, a2 = 0.7;
  const auto sol = solve_entropy_lp(EntropyRegularizedLp::from_alpha(kSimplex2, vec({a1, a2})));
  CHECK(sol.x(0) == doctest::Approx(a1 * a1 / (a1 * a1 + a2 * a2)).epsilon(1e-12));
  CHECK(sol.x(1) == doctest::Approx(a2 * a2 / (a1 * a1 + a2 * a2)).epsilon(1e-12));

  const LinearProgram lp(Matrix::Ones(1, 4), vec({1}), vec({1, 2, 3, 0.5}));
  for (double lam : {0.05, 0.5, 3.0}) {
    const auto s = solve_entropy_lp(EntropyRegularizedLp::from_lambda(lp, lam));
    const Vector w = (-lp.c() / lam).array().exp().matrix();
    CHECK((s.x - w / w.sum()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("entropy oracle properties on a random instance") {
  const auto g = gen_instance({3, 8, 4});
  const Vector alpha = Vector::Constant(8, 0.05);
  const auto prob = EntropyRegularizedLp::from_alpha(g.lp, alpha);
  const auto sol = solve_entropy_lp(prob);
  CHECK(sol.kkt_residual <= 1e-12);
  CHECK(sol.x.minCoeff() > 0.0);
  const Vector lhs = (sol.x.array() / alpha.array().square()).log().matrix();
  CHECK((lhs - g.lp.a().transpose() * sol.nu).cwiseAbs().maxCoeff() <= 1e-10);
  for (std::size_t i = 1; i < sol.dual_values.size(); ++i) {
    CHECK(sol.dual_values[i] <= sol.dual_values[i - 1] + 1e-12 * std::abs(sol.dual_values[i - 1]));
  }

  FeasibleSampler sampler(g.lp.a(), g.planted_x, 99);
  const double best = prob.objective(sol.x);
  for (int i = 0; i < 1000; ++i) {
    const Vector x = sampler.next();
    REQUIRE((g.lp.a() * x - g.lp.b()).norm() <= 1e-9);
    CHECK(best <= prob.objective(x) + 1e-12);
  }
}

TEST_CASE("entropy oracle errors") {
  const LinearProgram deficient(mat({{1, 1}, {2, 2}}), vec({1, 2}), vec({1, 1}));
  try {
    solve_entropy_lp(EntropyRegularizedLp::from_alpha(deficient, vec({1, 1})));
    FAIL("expected SingularHessian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularHessian);
  }
  const auto g = gen_instance({3, 8, 4});
  try {
    solve_entropy_lp(EntropyRegularizedLp::from_alpha(g.lp, Vector::Constant(8, 1e-3)), 1e-12, 1);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoConvergence);
  }
}

TEST_CASE("vertex oracle") {
  SUBCASE("tie broken toward the smallest support") {
    const auto sol = lp_vertex_oracle(kSimplex2);
    CHECK(sol.value == doctest::Approx(1.0));
    CHECK(sol.support == std::vector<Index>{0});
    CHECK(sol.x_star == vec({1, 0}));
    CHECK(sol.basic_feasible_count == 2);
  }
  SUBCASE("strict optimum") {
    const LinearProgram lp(mat({{1, 1}}), vec({1}), vec({1, 2}));
    const auto sol = lp_vertex_oracle(lp);
    CHECK(sol.x_star == vec({1, 0}));
    CHECK(sol.value == 1.0);
  }
  SUBCASE("random 3x8 beats sampled feasible points") {
    const auto g = gen_instance({3, 8, 6});
    const auto sol = lp_vertex_oracle(g.lp);
    CHECK((g.lp.a() * sol.x_star - g.lp.b()).norm() <= 1e-10);
    FeasibleSampler sampler(g.lp.a(), g.planted_x, 5);
    for (int i = 0; i < 1000; ++i) CHECK(sol.value <= g.lp.c().dot(sampler.next()) + 1e-12);
  }
  SUBCASE("infeasible and too large") {
    const LinearProgram infeasible(mat({{1, 1}}), vec({-1}), vec({1, 1}));
    CHECK_THROWS_AS(lp_vertex_oracle(infeasible), Error);
    const auto big = gen_instance({3, 30, 0});
    try {
      lp_vertex_oracle(big.lp);
      FAIL("expected TooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kTooLarge);
    }
  }
  SUBCASE("binomial") {
    CHECK(binomial(24, 12) == 2704156);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(3, 4) == 0);
  }
}

TEST_CASE("paper constants") {
  SUBCASE("scalar examples") {
    const auto one = compute_constants(lp1(1, 1), vec({1}));
    CHECK(one.r_squared == doctest::Approx(1.0 + std::numbers::e));
    const auto two = compute_constants(lp1(2, 1), vec({std::sqrt(0.5)}));
    // r0 = 2 * 0.5 - 1 = 0, so R^2 = 0.5 * (0 + 1) + e * 0.5.
    CHECK(two.r_squared == doctest::Approx(0.5 + 0.5 * std::numbers::e));
  }
  SUBCASE("2x4 matches brute force over column pairs") {
    const auto g = gen_instance({2, 4, 3});
    const Vector u0 = Vector::Constant(4, 0.1);
    const auto pc = compute_constants(g.lp, u0);
    double worst = 0.0;
    int count = 0;
    for (Index i = 0; i < 4; ++i)
      for (Index j = i + 1; j < 4; ++j) {
        Matrix sub(2, 2);
        sub << g.lp.a().col(i), g.lp.a().col(j);
        Eigen::JacobiSVD<Matrix> svd(sub);
        worst = std::max(worst, 1.0 / svd.singularValues()(1));
        ++count;
      }
    const double r0 = (g.lp.a() * u0.cwiseProduct(u0) - g.lp.b()).norm();
    const double expect = 2.0 * worst * (r0 + g.lp.b().norm()) + std::numbers::e * 4 * u0.squaredNorm();
    CHECK(pc.submatrix_count == count);
    CHECK(pc.r_squared == doctest::Approx(expect).epsilon(1e-12));
    CHECK_FALSE(pc.heuristic);
    CHECK(pc.r_squared >= std::numbers::e * 4 * u0.squaredNorm());
    const double na = std::sqrt(g.lp.lipschitz());
    const double eb = std::min(1.0 / (4 * na * (na * expect + g.lp.b().norm())),
                               1.0 / (5 * g.lp.lipschitz() * std::max(expect, 1.0)));
    CHECK(pc.eta_bar == doctest::Approx(eb).epsilon(1e-9));
  }
  SUBCASE("eta_bar is a valid constant stepsize") {
    const auto g = gen_instance({2, 5, 1});
    const Vector u0 = Vector::Constant(5, 0.3);
    const auto pc = compute_constants(g.lp, u0);
    auto s = SolverState::at(g.lp, u0);
    const double f0 = s.f;
    for (int k = 0; k < 20000; ++k) {
      REQUIRE(honors_stepsize_bound(g.lp, s, pc.eta_bar));
      const auto next = dln_step(g.lp, s, pc.eta_bar);
      REQUIRE(next.f - (s.f - 0.5 * pc.eta_bar * s.grad.squaredNorm()) <= 1e-12 * f0);
      s = next;
    }
  }
  SUBCASE("large instances need the heuristic flag") {
    const auto g = gen_instance({5, 40, 0});
    CHECK_THROWS_AS(compute_constants(g.lp, Vector::Constant(40, 0.1)), Error);
    ConstantsOptions opts;
    opts.allow_heuristic = true;
    opts.samples = 500;
    const auto pc = compute_constants(g.lp, Vector::Constant(40, 0.1), opts);
    CHECK(pc.heuristic);
    CHECK(pc.eta_bar > 0.0);
  }
}

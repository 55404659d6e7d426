#include <doctest.h>

#include "goq/eval_bench.hpp"
#include "goq/hr_scalar.hpp"
#include "goq/hr_vector.hpp"
#include "goq/rng.hpp"

#include <cmath>

using namespace goq;

namespace {
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("weight matrices: squared error") {
  const GoalModel sq = builtin_goal("squared-error", {{"dim", 3}});
  const WeightMatrices w = weight_matrices(sq, Vec::Constant(3, 0.7));
  CHECK((w.A - 2 * Mat::Identity(3, 3)).norm() < 1e-12);
  CHECK(w.B.norm() < 1e-12);
  CHECK(w.lambda_min == doctest::Approx(2.0));
  CHECK(w.lambda_max == doctest::Approx(2.0));
}

TEST_CASE("weight matrices: quadratic-2d at (1, 1)") {
  const GoalModel q = builtin_goal("quadratic-2d");
  const WeightMatrices w = weight_matrices(q, v2(1, 1));
  Mat j = Mat::Ones(2, 2), h(2, 2);
  h << 4, -2, -2, 4;
  CHECK((w.A - j.transpose() * h * j).norm() < 1e-10);
  CHECK(std::abs(w.lambda_min) < 1e-10);  // J has rank one
  CHECK(w.B.norm() < 1e-8);
}

TEST_CASE("weight matrices: scalar reduction") {
  const GoalModel ee = builtin_goal("scalar-ee");
  const Vec g = scalar_vec(1.7);
  const auto b = curvature(ee, g);
  const WeightMatrices w = weight_matrices(ee, g);
  CHECK(w.A(0, 0) == doctest::Approx(b.jac_chi(0, 0) * b.jac_chi(0, 0) * b.hess_f(0, 0)));
}

TEST_CASE("eigen sandwich and vanishing B at interior optima") {
  Rng rng(8);
  for (const char* id : {"quadratic-2d", "se-multiband"}) {
    const GoalModel goal = builtin_goal(id);
    for (int k = 0; k < 20; ++k) {
      const Vec g = v2(rng.uniform(0.2, 2.5), rng.uniform(0.2, 2.5));
      if (!goal.smooth_at(g, 1e-3)) continue;
      const WeightMatrices w = weight_matrices(goal, g);
      if (std::string(id) == "quadratic-2d") CHECK(w.B.norm() < 1e-8);
      for (int j = 0; j < 1000; ++j) {
        const Vec v = v2(rng.normal(), rng.normal());
        const double q = v.dot(w.A * v);
        CHECK(q >= w.lambda_min * v.squaredNorm() - 1e-9);
        CHECK(q <= w.lambda_max * v.squaredNorm() + 1e-9);
      }
    }
  }
}

TEST_CASE("mu_p constants") {
  CHECK(mu_p(1) == doctest::Approx(1.0 / 12));
  CHECK(mu_p(2) == doctest::Approx(5.0 / (36 * std::sqrt(3.0))));
  CHECK(mu_p(3) == doctest::Approx(0.0785));
}

TEST_CASE("ol_bounds: tight for the squared error, scalar consistency") {
  const SourceModel e2 = builtin_source("exp-iid", {{"dim", 2}});
  const OlBounds b = ol_bounds(builtin_goal("squared-error", {{"dim", 2}}), e2, 64);
  CHECK(b.lower == doctest::Approx(b.upper).epsilon(1e-9));

  const SourceModel te = builtin_source("trunc-exp");
  for (const char* id : {"scalar-quadratic", "scalar-ee", "scalar-log"}) {
    const GoalModel goal = builtin_goal(id);
    const OlBounds s = ol_bounds(goal, te, 16);
    INFO(id);
    CHECK(s.lower == doctest::Approx(s.upper).epsilon(1e-9));
    CHECK(s.upper == doctest::Approx(hr_ol_limit_optimal(goal, te, 16, 2)).epsilon(1e-6));
  }
}

TEST_CASE("ol_bounds scale as M^(-2/p)") {
  const SourceModel e2 = builtin_source("exp-iid", {{"dim", 2}});
  const GoalModel q = builtin_goal("quadratic-2d");
  CHECK(ol_bounds(q, e2, 32).upper / ol_bounds(q, e2, 64).upper == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("stretch factor") {
  Mat j(2, 2);
  j << 2, 0, 0, 3;
  CHECK(stretch_factor(j) == doctest::Approx(4.0));
  CHECK(stretch_factor(Mat::Ones(2, 2)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hr_equivalent: squared error equals the distortion") {
  const SourceModel u = builtin_source("uniform-box", {{"lo", 0.0}, {"hi", 1.0}, {"dim", 2}});
  const GoalModel sq = builtin_goal("squared-error", {{"dim", 2}});
  const Quantizer q = lloyd_max(u, 4, {}, 2).quantizer;
  const MonteCarloEstimate e = hr_equivalent(sq, q, u, 100000, 3);
  const LossReport r = monte_carlo_ol(sq, q, u, 100000, 3);
  CHECK(e.mean == doctest::Approx(r.mean_ol).epsilon(1e-9));

  // One representative at the mean: trace of the covariance, 2/12.
  const Quantizer one = Quantizer::plain(Vec::Constant(2, 0.5), u.support(), "mean");
  const MonteCarloEstimate c = hr_equivalent(sq, one, u, 100000, 4);
  CHECK(std::abs(c.mean - 2.0 / 12) < 3 * c.std_error);

  const MonteCarloEstimate c4 = hr_equivalent(sq, one, u, 400000, 4);
  CHECK(c.std_error / c4.std_error == doctest::Approx(2.0).epsilon(0.05));
}

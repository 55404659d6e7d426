#include <doctest.h>

#include "goq/goal_model.hpp"
#include "goq/prob_model.hpp"
#include "goq/rng.hpp"

#include <cmath>

using namespace goq;
using nlohmann::json;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

struct Probe {
  std::string id;
  json params;
  Box box;
};

std::vector<Probe> probes() {
  return {{"scalar-quadratic", json::object(), Box::interval(0.1, 10)},
          {"scalar-log", json::object(), Box::interval(0.1, 10)},
          {"scalar-ee", json::object(), Box::interval(0.1, 10)},
          {"scalar-ee", {{"eta", 3.0}}, Box::interval(0.1, 10)},
          {"scalar-sigmoid10", json::object(), Box::interval(0.1, 10)},
          {"ee-multiband", json::object(), Box::cube(2, 0.05, 3)},
          {"se-multiband", json::object(), Box::cube(2, 0.05, 3)},
          {"quadratic-2d", json::object(), Box::cube(2, 0, 3)},
          {"pcs-lp", {{"P", 2.0}}, Box::cube(24, 0, 4)},
          {"pcs-lp", {{"P", 12.0}}, Box::cube(24, 0, 4)},
          {"squared-error", {{"dim", 3}}, Box::cube(3, -2, 2)}};
}

Vec draw(Rng& rng, const Box& box) {
  Vec g(box.dim());
  for (int i = 0; i < g.size(); ++i) g(i) = rng.uniform(box.lo(i), box.hi(i));
  return g;
}

}  // namespace

TEST_CASE("builtin goals: decision functions of the scalar goals") {
  const GoalModel q = builtin_goal("scalar-quadratic");
  CHECK(q.evaluate(scalar_vec(1.5), scalar_vec(0.5)) == doctest::Approx(1.0));
  CHECK(q.decide(scalar_vec(2.7))(0) == doctest::Approx(2.7));

  const GoalModel lg = builtin_goal("scalar-log", {{"gain", 10.0}});
  CHECK(lg.decide(scalar_vec(1.0))(0) == doctest::Approx(0.9));
  CHECK(lg.decide(scalar_vec(0.05))(0) == 0.0);

  const GoalModel sg = builtin_goal("scalar-sigmoid10");
  CHECK(sg.decide(scalar_vec(1.0))(0) == doctest::Approx(3.6150).epsilon(1e-4));
  CHECK(sg.decide(scalar_vec(2.0))(0) == doctest::Approx(3.6150 / 2).epsilon(1e-4));

  const GoalModel ee = builtin_goal("scalar-ee", {{"eta", 3.0}});
  CHECK(ee.decide(scalar_vec(2.0))(0) == doctest::Approx(1.0 / 6));
}

TEST_CASE("builtin goals: parameter validation") {
  CHECK_THROWS_AS(builtin_goal("no-such-goal"), ConfigError);
  CHECK_THROWS_AS(builtin_goal("scalar-log", {{"gian", 10}}), ConfigError);
  CHECK_THROWS_AS(builtin_goal("scalar-ee", {{"eta", 0.5}}), ConfigError);
  CHECK_THROWS_AS(builtin_goal("pcs-lp", {{"P", 0.5}}), ConfigError);
  CHECK(builtin_goal_ids().size() == 9);
}

TEST_CASE("curvature: hand-computed bundles") {
  const auto b = curvature(builtin_goal("scalar-quadratic"), scalar_vec(1.0));
  CHECK(b.hess_f(0, 0) == doctest::Approx(2.0));
  CHECK(b.jac_chi(0, 0) == doctest::Approx(1.0));
  CHECK(b.hess_chi.at(0)(0, 0) == doctest::Approx(0.0));

  const auto q2 = curvature(builtin_goal("quadratic-2d"), v2(1, 1));
  CHECK((q2.jac_chi - Mat::Ones(2, 2)).norm() < 1e-12);
  Mat h(2, 2);
  h << 4, -2, -2, 4;
  CHECK((q2.hess_f - h).norm() < 1e-12);
}

TEST_CASE("scalar-ee with eta = 3: stationary at c/(eta g) with curvature") {
  const GoalModel ee = builtin_goal("scalar-ee", {{"eta", 3.0}});
  const Vec g = scalar_vec(1.0);
  CHECK(std::abs(scalar_x_derivative(ee, g, 1)) < 1e-6);
  CHECK(std::abs(scalar_x_derivative(ee, g, 2)) > 1.0);
}

TEST_CASE("detect_kappa is 2 for the smooth scalar goals") {
  const SourceModel uni = builtin_source("uniform-box", {{"lo", 0.1}, {"hi", 10.0}});
  const SourceModel texp = builtin_source("trunc-exp");
  CHECK(detect_kappa(builtin_goal("scalar-quadratic"), uni, 100) == 2);
  CHECK(detect_kappa(builtin_goal("scalar-ee"), texp, 100) == 2);
  CHECK(detect_kappa(builtin_goal("scalar-log"), uni, 100) == 2);
  CHECK(detect_kappa(builtin_goal("scalar-sigmoid10"), texp, 100) == 2);
}

TEST_CASE("analytic and numeric curvature agree away from kinks") {
  for (const auto& p : probes()) {
    const GoalModel goal = builtin_goal(p.id, p.params);
    Rng rng(derive_seed(11, p.id));
    int n = 0;
    while (n < 15) {
      const Vec g = draw(rng, p.box);
      if (!goal.smooth_at(g, 3e-3 * std::max(1.0, g.cwiseAbs().maxCoeff()))) continue;
      ++n;
      INFO(p.id, " ", p.params.dump());
      CHECK(cross_validate(goal, g).worst() < 1e-4);
    }
  }
}

TEST_CASE("probing optimality: no feasible probe beats the decision") {
  for (const auto& p : probes()) {
    const GoalModel goal = builtin_goal(p.id, p.params);
    Rng rng(derive_seed(12, p.id + p.params.dump()));
    for (int k = 0; k < 100; ++k) {
      const Vec g = draw(rng, p.box);
      const Vec x = goal.decide(g);
      REQUIRE(goal.decision_set().contains(x, 1e-9));
      const double fx = goal.evaluate(x, g);
      double worst = 0;
      for (int j = 0; j < 1000; ++j) {
        const double radius = (j % 2 ? 1e-3 : 1.0) * std::max(1.0, x.cwiseAbs().maxCoeff());
        const Vec y = goal.decision_set().random_point(rng, x, radius);
        worst = std::min(worst, goal.evaluate(y, g) - fx);
      }
      INFO(p.id, " g=", g.transpose());
      CHECK(worst >= -1e-9 * std::max(1.0, std::abs(fx)));
    }
  }
}

TEST_CASE("negated goals: decision maximises the original metric") {
  // Energy efficiency exp(-c/(xg))/x^eta, evaluated without the goal model.
  const double c = 1.0, eta = 3.0;
  const GoalModel ee = builtin_goal("scalar-ee", {{"eta", eta}, {"c", c}});
  CHECK(ee.negated());
  for (double g : {0.2, 1.0, 7.0}) {
    auto metric = [&](double x) { return std::exp(-c / (x * g)) / std::pow(x, eta); };
    const double x = ee.decide(scalar_vec(g))(0);
    for (double t : {0.5, 0.9, 0.99, 1.01, 1.1, 2.0}) CHECK(metric(x) >= metric(t * x));
  }
}

TEST_CASE("quadratic-2d: first-order condition holds on the interior") {
  const GoalModel q = builtin_goal("quadratic-2d");
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const Vec g = v2(rng.uniform(0.05, 3), rng.uniform(0.05, 3));
    CHECK(q.oracles().grad_x(q.decide(g), g).norm() < 1e-8);
  }
}

TEST_CASE("closed-form decisions match projected gradient") {
  Rng rng(5);
  for (const char* id : {"se-multiband", "pcs-lp"}) {
    const GoalModel goal = builtin_goal(id, std::string(id) == "pcs-lp" ? json{{"P", 2.0}, {"dim", 6}, {"E", 5.0}}
                                                                       : json::object());
    for (int k = 0; k < 10; ++k) {
      Vec g(goal.param_dim());
      for (int i = 0; i < g.size(); ++i) g(i) = rng.uniform(0.1, 3);
      const Vec closed = goal.decide(g);
      const Vec x0 = goal.decision_set().project(Vec::Constant(g.size(), 1.0));
      const Vec pg = projected_gradient_decide(goal, g, x0);
      INFO(id, " g=", g.transpose());
      CHECK(goal.evaluate(closed, g) <= goal.evaluate(pg, g) + 1e-8);
      CHECK(goal.evaluate(pg, g) - goal.evaluate(closed, g) < 1e-6);
    }
  }
}

TEST_CASE("decision sets: projection") {
  const DecisionSet cov = DecisionSet::covering(4, 8.0);
  const Vec p = cov.project(Vec::Zero(4));
  CHECK((p - Vec::Constant(4, 2.0)).norm() < 1e-9);
  CHECK(cov.contains(p));
  const DecisionSet bud = DecisionSet::budget(2, 2.0);
  CHECK((bud.project(v2(3, 3)) - v2(1, 1)).norm() < 1e-9);
  CHECK((bud.project(v2(-1, 0.5)) - v2(0, 0.5)).norm() < 1e-9);
}

TEST_CASE("exact loss is nonnegative and zero at z = g") {
  const GoalModel q = builtin_goal("quadratic-2d");
  CHECK(q.exact_loss(v2(1, 1), v2(1, 1)) == doctest::Approx(0.0));
  CHECK(q.exact_loss(v2(1, 1), v2(1.2, 0.7)) > 0);
  const GoalModel s = q.with_scale(3.0);
  CHECK(s.exact_loss(v2(1, 1), v2(1.2, 0.7)) == doctest::Approx(3 * q.exact_loss(v2(1, 1), v2(1.2, 0.7))));
}

#include <doctest.h>

#include "goq/eval_bench.hpp"
#include "goq/goq_solver.hpp"
#include "goq/hr_vector.hpp"
#include "goq/rng.hpp"

#include <cmath>
#include <limits>

using namespace goq;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double total_exact(const GoalModel& goal, const Mat& pts, const Quantizer& q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) s += goal.exact_loss(pts.col(i), q.quantize(pts.col(i)));
  return s;
}

Box bounds(const Mat& pts) { return {pts.rowwise().minCoeff(), pts.rowwise().maxCoeff()}; }

}  // namespace

TEST_CASE("individual loss") {
  const GoalModel sq = builtin_goal("squared-error", {{"dim", 2}});
  const Vec g = v2(0.3, -1.2), z = v2(1.0, 0.5);
  CHECK(individual_loss(sq, g, z) == doctest::Approx(2 * (g - z).squaredNorm()));
  for (const GoalModel& goal : {builtin_goal("quadratic-2d"), builtin_goal("se-multiband"), sq})
    CHECK(individual_loss(goal, v2(1.1, 0.7), v2(1.1, 0.7)) == 0.0);
  CHECK(individual_loss(builtin_goal("scalar-ee"), scalar_vec(2.0), scalar_vec(2.0), LossMode::exact) == 0.0);
}

TEST_CASE("individual loss: second-order agreement with the exact loss") {
  // The quadratic form carries no 1/2, so half of it is the Taylor term.
  const GoalModel q = builtin_goal("quadratic-2d");
  const Vec g = v2(1, 1);
  double prev = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    const Vec z = v2(1 + h, 1 + h);
    const double err = std::abs(0.5 * individual_loss(q, g, z) - individual_loss(q, g, z, LossMode::exact));
    CHECK(err <= 25 * h * h * h);
    if (prev > 0) CHECK(err < prev / 6);
    prev = err;
  }
}

TEST_CASE("squared error on uniform [0, 1], M = 2: Lloyd fixed point") {
  const SourceModel u = builtin_source("uniform-box", {{"lo", 0.0}, {"hi", 1.0}});
  SolverConfig cfg;
  cfg.M = 2;
  cfg.mc_points = 200000;
  cfg.seed = 3;
  const SolveResult r = solve(builtin_goal("scalar-quadratic"), u, cfg);
  const Mat& z = r.quantizer.representatives();
  const double a = std::min(z(0, 0), z(0, 1)), b = std::max(z(0, 0), z(0, 1));
  CHECK(a == doctest::Approx(0.25).epsilon(4e-3));
  CHECK(b == doctest::Approx(0.75).epsilon(4e-3));
  CHECK(r.trace.converged);
}

TEST_CASE("M = 1: representative at the E-weighted centroid") {
  const GoalModel goal = builtin_goal("se-multiband");
  const SourceModel src = builtin_source("exp-iid", {{"dim", 2}});
  const Mat pts = src.sample(3000, 4);
  SolverConfig cfg;
  cfg.M = 1;
  const SolveResult r = solve_on(goal, pts, src.support(), cfg, &src);
  Mat sw = Mat::Zero(2, 2);
  Vec swg = Vec::Zero(2);
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const Mat e = weight_matrices(goal, pts.col(i), false).E;
    sw += e;
    swg += e * pts.col(i);
  }
  const Vec c = sw.ldlt().solve(swg);
  CHECK((r.quantizer.representative(0) - c).norm() < 1e-4 * (1 + c.norm()));
  CHECK(r.trace.records.size() <= 5);
}

TEST_CASE("trace: descent and feasibility") {
  const GoalModel goal = builtin_goal("quadratic-2d");
  const SourceModel src = builtin_source("exp-iid", {{"dim", 2}});
  SolverConfig cfg;
  cfg.M = 6;
  cfg.mc_points = 4000;
  cfg.seed = 9;
  const SolveResult r = solve(goal, src, cfg);
  REQUIRE(r.trace.records.size() >= 2);
  for (std::size_t t = 1; t < r.trace.records.size(); ++t)
    CHECK(r.trace.records[t].loss <= r.trace.records[t - 1].loss * (1 + 1e-10) + 1e-14);
  for (int m = 0; m < r.quantizer.size(); ++m) CHECK(src.support().contains(r.quantizer.representative(m), 1e-12));
  r.quantizer.validate();
  CHECK(trace_csv(r.trace).str().rfind("iter,loss,max_disp,repairs\n", 0) == 0);
}

TEST_CASE("solve is deterministic for a fixed seed") {
  const GoalModel goal = builtin_goal("scalar-ee");
  const SourceModel src = builtin_source("trunc-exp");
  SolverConfig cfg;
  cfg.M = 8;
  cfg.seed = 21;
  const SolveResult a = solve(goal, src, cfg), b = solve(goal, src, cfg);
  CHECK(a.quantizer.representatives() == b.quantizer.representatives());
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.M = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.step.beta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(loss_mode_from_string(to_string(LossMode::exact)) == LossMode::exact);
  CHECK_THROWS_AS(init_rule_from_string("random"), ConfigError);
}

TEST_CASE("cluster: 6-point pcs toy matches brute force over 2-partitions") {
  const GoalModel goal = builtin_goal("pcs-lp", {{"dim", 2}, {"P", 2.0}, {"E", 1.0}});
  Mat pts(2, 6);
  pts << 2.0, 2.2, 1.9, 0.2, 0.3, 0.25,  //
      0.2, 0.3, 0.1, 2.1, 1.8, 2.0;
  const Box box = bounds(pts);

  // Loss of every point against every grid representative.
  const int k = 301;
  std::vector<Vec> grid;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      grid.push_back(v2(box.lo(0) + (box.hi(0) - box.lo(0)) * i / (k - 1),
                        box.lo(1) + (box.hi(1) - box.lo(1)) * j / (k - 1)));
  std::vector<std::vector<double>> loss(6, std::vector<double>(grid.size()));
  for (int n = 0; n < 6; ++n)
    for (std::size_t c = 0; c < grid.size(); ++c) loss[n][c] = goal.exact_loss(pts.col(n), grid[c]);
  double brute = std::numeric_limits<double>::infinity();
  unsigned best_mask = 0;
  for (unsigned mask = 1; mask < 32; ++mask) {  // point 0 stays in group 0
    double total = 0.0;
    for (int grp = 0; grp < 2; ++grp) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < grid.size(); ++c) {
        double s = 0.0;
        for (int n = 0; n < 6; ++n)
          if (((n > 0 && (mask >> (n - 1)) & 1u) ? 1 : 0) == grp) s += loss[n][c];
        best = std::min(best, s);
      }
      total += best;
    }
    if (total < brute) brute = total, best_mask = mask;
  }
  CHECK(best_mask == 0b11100);

  const SourceModel data = SourceModel::empirical("toy", pts);
  SolverConfig cfg;
  cfg.M = 2;
  cfg.restarts = 4;
  const SolveResult r = cluster(goal, data, cfg);
  const double got = total_exact(goal, pts, r.quantizer);
  CHECK(got <= brute * (1 + 1e-3) + 1e-12);
  CHECK(r.labels[0] == r.labels[1]);
  CHECK(r.labels[0] == r.labels[2]);
  CHECK(r.labels[3] == r.labels[4]);
  CHECK(r.labels[3] == r.labels[5]);
  CHECK(r.labels[0] != r.labels[3]);

  const Quantizer km = kmeans(pts, data.support(), 2, {}, 1).quantizer;
  CHECK(got <= total_exact(goal, pts, km) + 1e-12);
}

TEST_CASE("cluster: one representative per point gives zero loss") {
  const SourceModel data = builtin_source("synthetic-load", {{"dim", 4}, {"count", 12}, {"seed", 5}});
  const GoalModel goal = builtin_goal("pcs-lp", {{"dim", 4}, {"P", 4.0}, {"E", 2.0}});
  SolverConfig cfg;
  cfg.M = 12;
  const SolveResult r = cluster(goal, data, cfg);
  CHECK(total_exact(goal, data.data(), r.quantizer) <= 1e-9);
}

TEST_CASE("cluster with the squared error agrees with k-means") {
  Mat pts(2, 40);
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    const double cx = i < 20 ? 0.0 : 5.0;
    pts(0, i) = cx + 0.3 * rng.normal();
    pts(1, i) = cx + 0.3 * rng.normal();
  }
  const SourceModel data = SourceModel::empirical("blobs", pts);
  SolverConfig cfg;
  cfg.M = 2;
  const SolveResult r = cluster(builtin_goal("squared-error", {{"dim", 2}}), data, cfg);
  const LloydResult km = kmeans(pts, data.support(), 2, {}, 1);
  for (int i = 0; i < 40; ++i)
    CHECK(r.quantizer.representative(r.labels[i]).isApprox(km.quantizer.quantize(pts.col(i)), 1e-4));
  CHECK(r.quantizer.provenance() == "goq-cluster");
}

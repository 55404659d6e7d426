#pragma once

#include "goq/csv.hpp"
#include "goq/goal_model.hpp"
#include "goq/prob_model.hpp"
#include "goq/quantizer.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace goq {

enum class LossMode { approx, exact };
enum class InitRule { automatic, density_quantile, kmeans_seed, explicit_reps };

std::string to_string(LossMode mode);
LossMode loss_mode_from_string(const std::string& s);
InitRule init_rule_from_string(const std::string& s);

struct StepRule {
  enum class Kind { fixed, backtracking };
  Kind kind = Kind::backtracking;
  /// Fixed step size; for backtracking the initial step (0 = 1/(2 lambda_max)
  /// of the region-average E).
  double r = 0.0;
  double beta = 0.5;
  double c = 1e-4;
};

struct SolverConfig {
  int M = 2;
  int max_iters = 200;
  /// Threshold on sum_m ||z_m^(t) - z_m^(t-1)||^2; <= 0 picks 1e-8 for
  /// scalars and 1e-6 for vectors.
  double epsilon = 0.0;
  StepRule step;
  /// Gradient steps per representative per iteration.
  int inner_steps = 25;
  InitRule init = InitRule::automatic;
  Mat explicit_init;  // p x M, for InitRule::explicit_reps
  std::size_t mc_points = 10000;
  std::uint64_t seed = 1;
  LossMode loss = LossMode::approx;
  /// Seeded multi-start count; the lowest final loss wins.
  int restarts = 1;
  int threads = 0;
  /// Replaces E_{f,chi}(g) in approx mode (e.g. the identity).
  MetricFn metric;
  /// Pattern search (exact mode) stop radius.
  double pattern_tol = 1e-6;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  double max_disp = 0.0;
  int repairs = 0;
};

struct SolveTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  int restart = 0;
  double final_loss = 0.0;
};

struct SolveResult {
  Quantizer quantizer;
  SolveTrace trace;
  std::vector<int> labels;  // region of each training point
};

/// Approximate individual loss (g - z)^T E(g) (g - z), or the exact
/// f(chi(z); g) - f(chi(g); g).
double individual_loss(const GoalModel& goal, const Vec& g, const Vec& z, LossMode mode = LossMode::approx);

/// Alternating region / representative optimisation on a fixed seeded
/// sample (analytic source) or on the dataset (empirical source).
SolveResult solve(const GoalModel& goal, const SourceModel& source, const SolverConfig& cfg);
/// Same, on explicit training points (p x n).
SolveResult solve_on(const GoalModel& goal, const Mat& points, const Box& support, const SolverConfig& cfg,
                     const SourceModel* source = nullptr);
/// Data-based goal-oriented clustering with the exact loss.
SolveResult cluster(const GoalModel& goal, const SourceModel& dataset, const SolverConfig& cfg);

CsvTable trace_csv(const SolveTrace& trace);

}  // namespace goq

#pragma once

#include "goq/csv.hpp"
#include "goq/goal_model.hpp"
#include "goq/goq_solver.hpp"
#include "goq/prob_model.hpp"
#include "goq/quantizer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace goq {

struct LossReport {
  std::string quantizer_tag;
  std::string goal_tag;
  int M = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double mean_ol = 0.0;
  double std_error = 0.0;
  /// Mean over samples of 100 * loss / |f(chi(g); g)|, guarded samples excluded.
  double mean_relative_ol_pct = 0.0;
  /// 100 * mean loss / mean |f(chi(g); g)|.
  double ratio_of_means_pct = 0.0;
  double guarded_fraction = 0.0;
  std::size_t skipped = 0;
};

nlohmann::json to_json(const LossReport& r);
CsvTable reports_csv(const std::vector<LossReport>& reports);

using QuantizeFn = std::function<Vec(const Vec&)>;

struct EvalOptions {
  double guard = 1e-9;
  int threads = 0;
};

/// Exact OL of g -> quantize(g) on explicit points (p x n).
LossReport evaluate_points(const GoalModel& goal, const QuantizeFn& quantize, const Mat& points,
                           const EvalOptions& opt = {});

LossReport monte_carlo_ol(const GoalModel& goal, const Quantizer& q, const SourceModel& source, std::size_t n,
                          std::uint64_t seed, const EvalOptions& opt = {});
/// Same with an arbitrary map, e.g. the identity (no quantization).
LossReport monte_carlo_ol(const GoalModel& goal, const QuantizeFn& quantize, const SourceModel& source,
                          std::size_t n, std::uint64_t seed, const EvalOptions& opt = {});

/// Every quantizer sees the same seeded sample.
std::vector<LossReport> compare(const GoalModel& goal, const SourceModel& source, const std::vector<Quantizer>& qs,
                                std::size_t n, std::uint64_t seed, const EvalOptions& opt = {});

enum class ClusterMethod { goq, kmeans };
std::string to_string(ClusterMethod m);

struct RequiredM {
  int M = 0;
  bool saturated = false;  // target not met within the range; M is the upper end
  double rel_ol_pct = 0.0;
  std::vector<std::pair<int, double>> path;  // (M, relative OL) visited
};

/// Smallest M in [m_lo, m_hi] whose in-sample mean relative OL is <= target,
/// by increasing M with warm starts (the worst-served point becomes a new
/// representative).
RequiredM required_clusters(const GoalModel& goal, const SourceModel& dataset, double target_pct, int m_lo, int m_hi,
                            ClusterMethod method, const SolverConfig& cfg);

struct RequiredRow {
  double P = 0.0;
  RequiredM goq;
  RequiredM kmeans;
};

/// One row per exponent; make_goal builds the goal for a given P.
std::vector<RequiredRow> required_clusters_sweep(const std::function<GoalModel(double)>& make_goal,
                                                 const SourceModel& dataset, const std::vector<double>& P_values,
                                                 double target_pct, int m_lo, int m_hi, const SolverConfig& cfg);

}  // namespace goq

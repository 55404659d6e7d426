#pragma once

#include "goq/goal_model.hpp"
#include "goq/types.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace goq {

class DensityProfile;
class SourceModel;

enum class RegionRule { plain, weighted, scalar_intervals, goal_loss };

std::string to_string(RegionRule rule);
RegionRule region_rule_from_string(const std::string& s);

/// g -> E(g), the matrix of the weighted nearest-neighbour rule.
using MetricFn = std::function<Mat(const Vec&)>;

/// M representatives plus a region rule. Region indices are 0-based.
class Quantizer {
 public:
  static Quantizer plain(Mat reps, Box support, std::string provenance);
  static Quantizer scalar_intervals(std::vector<double> boundaries, std::vector<double> reps, std::string provenance);
  /// Weighted rule argmin_m (g - z_m)^T E(g) (g - z_m). `metric_info`
  /// identifies the oracle for serialisation (e.g. the goal record).
  static Quantizer weighted(Mat reps, Box support, MetricFn metric, nlohmann::json metric_info, std::string provenance);
  /// Exact-loss rule argmin_m f(chi(z_m); g) for a goal.
  static Quantizer goal_loss(Mat reps, Box support, const GoalModel& goal, std::string provenance);

  int size() const { return static_cast<int>(reps_.cols()); }
  int dim() const { return static_cast<int>(reps_.rows()); }
  RegionRule rule() const { return rule_; }
  const Mat& representatives() const { return reps_; }
  Vec representative(int m) const { return reps_.col(m); }
  const std::vector<double>& boundaries() const { return boundaries_; }
  const Box& support() const { return support_; }
  const std::string& provenance() const { return provenance_; }
  std::uint64_t seed() const { return seed_; }
  const nlohmann::json& metric_info() const { return metric_info_; }
  const MetricFn& metric() const { return metric_; }

  Quantizer& set_provenance(std::string tag);
  Quantizer& set_seed(std::uint64_t seed);

  /// Region of g; points outside the support are clamped and counted.
  int encode(const Vec& g) const;
  /// Weighted rule with a precomputed E(g).
  int encode_with_metric(const Vec& g, const Mat& e) const;
  Vec decode(int m) const { return reps_.col(m); }
  Vec quantize(const Vec& g) const { return decode(encode(g)); }
  std::size_t clamped_count() const { return clamped_->load(); }

  /// Structural invariants (distinct representatives inside support,
  /// increasing boundaries, encode(decode(m)) == m). Throws NumericError.
  void validate() const;

  nlohmann::json to_json() const;
  /// Weighted and goal-loss rules are rebuilt from the stored goal record.
  static Quantizer from_json(const nlohmann::json& j);

 private:
  RegionRule rule_ = RegionRule::plain;
  Mat reps_;
  Box support_;
  std::vector<double> boundaries_;
  MetricFn metric_;
  nlohmann::json metric_info_;
  std::vector<Vec> decisions_;
  std::shared_ptr<const GoalModel> goal_;
  std::string provenance_;
  std::uint64_t seed_ = 0;
  std::shared_ptr<std::atomic<std::size_t>> clamped_ = std::make_shared<std::atomic<std::size_t>>(0);
};

Quantizer build_uniform_scalar(double lo, double hi, int M);
/// Product of per-axis uniform scalar quantizers with `levels` cells each
/// (plain rule over the grid of cell midpoints).
Quantizer build_uniform_product(const Box& support, int levels);
Quantizer build_compander_scalar(const DensityProfile& rho, int M);

struct LloydConfig {
  double epsilon = 1e-10;
  int max_iters = 200;
  /// Sample size for non-scalar or empirical sources.
  std::size_t mc_points = 20000;
  int threads = 0;
};

struct LloydResult {
  Quantizer quantizer;
  std::vector<double> distortion;  // per iteration, after the centroid step
  int iterations = 0;
  bool converged = false;
  int repairs = 0;
};

/// Classical Lloyd-Max. Scalar analytic sources use quadrature; otherwise
/// k-means over a seeded sample (or the dataset itself).
LloydResult lloyd_max(const SourceModel& source, int M, const LloydConfig& cfg, std::uint64_t seed);
/// k-means on explicit points (p x n), D^2 seeding.
LloydResult kmeans(const Mat& points, const Box& support, int M, const LloydConfig& cfg, std::uint64_t seed);
/// k-means from explicit initial representatives.
LloydResult kmeans_from(const Mat& points, const Box& support, Mat init, const LloydConfig& cfg);

}  // namespace goq

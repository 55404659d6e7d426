#pragma once

#include "goq/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace goq {

class SourceModel;
class Rng;

/// Feasible set for the decision x: lower/upper bounds per component plus an
/// optional constraint on the component sum.
struct DecisionSet {
  enum class Sum { none, at_most, at_least };

  Vec lo;  // -inf allowed
  Vec hi;  // +inf allowed
  Sum sum_rule = Sum::none;
  double sum_bound = 0.0;

  static DecisionSet unbounded(int dim);
  static DecisionSet nonnegative(int dim);
  /// {x >= 0, sum x <= budget}
  static DecisionSet budget(int dim, double budget);
  /// {x >= 0, sum x >= demand}
  static DecisionSet covering(int dim, double demand);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x, double tol = 1e-9) const;
  /// Euclidean projection onto the set (exact for all supported shapes).
  Vec project(const Vec& x) const;
  /// Random feasible point; unbounded directions are drawn within `radius`
  /// of `center`.
  Vec random_point(Rng& rng, const Vec& center, double radius) const;
};

using GoalFn = std::function<double(const Vec& x, const Vec& g)>;
using DecideFn = std::function<Vec(const Vec& g)>;
using GradFn = std::function<Vec(const Vec& x, const Vec& g)>;
using HessFn = std::function<Mat(const Vec& x, const Vec& g)>;
using JacFn = std::function<Mat(const Vec& g)>;
using HessChiFn = std::function<std::vector<Mat>(const Vec& g)>;
using KinkFn = std::function<double(const Vec& g)>;

struct DerivativeOracles {
  GradFn grad_x;
  HessFn hess_x;
  JacFn jac_chi;
  HessChiFn hess_chi;

  bool complete() const { return grad_x && hess_x && jac_chi && hess_chi; }
};

/// A goal f(x;g) in minimisation convention together with its decision
/// function chi and optional derivative oracles.
class GoalModel {
 public:
  struct Spec {
    std::string id;
    nlohmann::json params = nlohmann::json::object();
    int decision_dim = 1;
    int param_dim = 1;
    GoalFn evaluate;
    DecideFn decide;
    DecisionSet decision_set;
    DerivativeOracles oracles;
    /// Distance-like measure to the nearest non-smooth point of chi; absent
    /// means chi is smooth everywhere.
    KinkFn kink_distance;
    double scale_factor = 1.0;
    bool negated = false;
    bool optimal_decision = true;
  };

  explicit GoalModel(Spec spec);

  const std::string& id() const { return spec_->id; }
  const nlohmann::json& params() const { return spec_->params; }
  int decision_dim() const { return spec_->decision_dim; }
  int param_dim() const { return spec_->param_dim; }
  const DecisionSet& decision_set() const { return spec_->decision_set; }
  const DerivativeOracles& oracles() const { return spec_->oracles; }
  double scale_factor() const { return spec_->scale_factor; }
  bool negated() const { return spec_->negated; }
  bool optimal_decision() const { return spec_->optimal_decision; }

  double evaluate(const Vec& x, const Vec& g) const { return spec_->evaluate(x, g); }
  Vec decide(const Vec& g) const { return spec_->decide(g); }
  /// f(chi(z); g) - f(chi(g); g), the exact individual loss.
  double exact_loss(const Vec& g, const Vec& z) const;

  bool smooth_at(const Vec& g, double margin = 1e-9) const;
  double kink_distance(const Vec& g) const;

  /// Same goal with a user supplied (possibly suboptimal) decision function.
  /// Analytic chi derivatives are dropped unless supplied.
  GoalModel with_decision(DecideFn decide, std::string tag, JacFn jac = {}, HessChiFn hess = {}) const;
  GoalModel with_scale(double alpha) const;
  /// Same goal with every analytic oracle removed (finite differences only).
  GoalModel without_oracles() const;

  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const Spec> spec_;
};

struct CurvatureBundle {
  Vec grad_f;
  Mat hess_f;
  Mat jac_chi;
  std::vector<Mat> hess_chi;
  bool analytic = false;
  /// A finite-difference probe had to fall back to a one-sided stencil
  /// because the centred one would leave the decision set.
  bool degraded = false;
};

enum class DerivativeSource { automatic, analytic, numeric };

CurvatureBundle curvature(const GoalModel& goal, const Vec& g,
                          DerivativeSource source = DerivativeSource::automatic);

struct CurvatureMismatch {
  double grad = 0.0;
  double hess_f = 0.0;
  double jac_chi = 0.0;
  double hess_chi = 0.0;
  double worst() const;
};

/// Scaled component-wise relative difference between the analytic and the
/// finite-difference bundle: max |a - n| / max(1, max |a|) per block.
CurvatureMismatch cross_validate(const GoalModel& goal, const Vec& g);

/// i-th partial derivative of f in x at x = chi(g), scalar goals only
/// (order 1..4, finite differences unless order <= 2 and oracles exist).
double scalar_x_derivative(const GoalModel& goal, const Vec& g, int order);

/// Smallest order i in 1..4 whose derivative is non-negligible at >= 99% of
/// the probes (probes at kinks are skipped).
int detect_kappa(const GoalModel& goal, const SourceModel& source, int probes, std::uint64_t seed = 1);

struct ProjectedGradientOptions {
  int max_iters = 10000;
  double step_tol = 1e-9;
  double initial_step = 1.0;
};

/// Minimises f(.; g) over the decision set by projected gradient with
/// Armijo backtracking. Gradient from the oracle or central differences.
Vec projected_gradient_decide(const GoalModel& goal, const Vec& g, const Vec& x0,
                              const ProjectedGradientOptions& opt = {});

GoalModel builtin_goal(const std::string& name, const nlohmann::json& params = nlohmann::json::object());
std::vector<std::string> builtin_goal_ids();

}  // namespace goq

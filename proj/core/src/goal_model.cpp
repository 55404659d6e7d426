#include "goq/goal_model.hpp"

#include "goq/numerics.hpp"
#include "goq/prob_model.hpp"
#include "goq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace goq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DecisionSet DecisionSet::unbounded(int dim) {
  DecisionSet s;
  s.lo = Vec::Constant(dim, -kInf);
  s.hi = Vec::Constant(dim, kInf);
  return s;
}

DecisionSet DecisionSet::nonnegative(int dim) {
  DecisionSet s = unbounded(dim);
  s.lo.setZero();
  return s;
}

DecisionSet DecisionSet::budget(int dim, double budget) {
  DecisionSet s = nonnegative(dim);
  s.sum_rule = Sum::at_most;
  s.sum_bound = budget;
  return s;
}

DecisionSet DecisionSet::covering(int dim, double demand) {
  DecisionSet s = nonnegative(dim);
  s.sum_rule = Sum::at_least;
  s.sum_bound = demand;
  return s;
}

bool DecisionSet::contains(const Vec& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= lo(i) - tol && x(i) <= hi(i) + tol)) return false;
  }
  switch (sum_rule) {
    case Sum::at_most:
      return x.sum() <= sum_bound + tol * std::max(1.0, std::abs(sum_bound));
    case Sum::at_least:
      return x.sum() >= sum_bound - tol * std::max(1.0, std::abs(sum_bound));
    case Sum::none:
      break;
  }
  return true;
}

Vec DecisionSet::project(const Vec& x) const {
  Vec y = x.cwiseMax(lo).cwiseMin(hi);
  if (sum_rule == Sum::none) return y;
  const double s = y.sum();
  if ((sum_rule == Sum::at_most && s <= sum_bound) || (sum_rule == Sum::at_least && s >= sum_bound)) return y;
  // The sum constraint is active: the projection is clamp(x - tau) with tau
  // chosen so the clamped sum hits the bound (monotone in tau).
  auto clamped_sum = [&](double tau) { return (x.array() - tau).max(lo.array()).min(hi.array()).sum(); };
  double a = (x - hi).minCoeff();
  double b = (x - lo).maxCoeff();
  if (!std::isfinite(a)) a = x.minCoeff() - std::abs(sum_bound) - 1.0;
  if (!std::isfinite(b)) b = x.maxCoeff() + std::abs(sum_bound) + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (clamped_sum(m) > sum_bound)
      a = m;
    else
      b = m;
    if (b - a <= 1e-15 * std::max(1.0, std::abs(m))) break;
  }
  return (x.array() - 0.5 * (a + b)).max(lo.array()).min(hi.array()).matrix();
}

Vec DecisionSet::random_point(Rng& rng, const Vec& center, double radius) const {
  Vec x(dim());
  for (int i = 0; i < dim(); ++i) {
    const double a = std::max(lo(i), center(i) - radius);
    const double b = std::min(hi(i), center(i) + radius);
    x(i) = rng.uniform(a, std::max(a, b));
  }
  const double s = x.sum();
  if (sum_rule == Sum::at_most && s > sum_bound && s > 0) {
    x *= sum_bound * rng.uniform() / s;
  } else if (sum_rule == Sum::at_least && s < sum_bound) {
    if (s <= 0) x.setConstant(sum_bound / dim());
    x *= sum_bound * (1.0 + rng.uniform()) / std::max(x.sum(), 1e-300);
  }
  return x;
}

GoalModel::GoalModel(Spec spec) {
  if (spec.decision_dim < 1 || spec.param_dim < 1) throw ConfigError("goal: dimensions must be positive");
  if (!spec.evaluate || !spec.decide) throw ConfigError("goal: evaluate and decide are required");
  if (!(spec.scale_factor > 0)) throw ConfigError("goal: scale factor must be positive");
  if (spec.decision_set.dim() == 0) spec.decision_set = DecisionSet::unbounded(spec.decision_dim);
  if (spec.decision_set.dim() != spec.decision_dim) throw ConfigError("goal: decision set dimension mismatch");
  spec_ = std::make_shared<const Spec>(std::move(spec));
}

double GoalModel::exact_loss(const Vec& g, const Vec& z) const {
  return evaluate(decide(z), g) - evaluate(decide(g), g);
}

double GoalModel::kink_distance(const Vec& g) const {
  return spec_->kink_distance ? spec_->kink_distance(g) : kInf;
}

bool GoalModel::smooth_at(const Vec& g, double margin) const { return kink_distance(g) > margin; }

GoalModel GoalModel::with_decision(DecideFn decide, std::string tag, JacFn jac, HessChiFn hess) const {
  Spec s = *spec_;
  s.decide = std::move(decide);
  s.oracles.jac_chi = std::move(jac);
  s.oracles.hess_chi = std::move(hess);
  s.kink_distance = {};
  s.optimal_decision = false;
  s.params["decision"] = std::move(tag);
  return GoalModel(std::move(s));
}

GoalModel GoalModel::with_scale(double alpha) const {
  Spec s = *spec_;
  s.scale_factor = alpha;
  auto base = spec_->evaluate;
  s.evaluate = [base, alpha](const Vec& x, const Vec& g) { return alpha * base(x, g); };
  if (auto gx = spec_->oracles.grad_x) s.oracles.grad_x = [gx, alpha](const Vec& x, const Vec& g) { return Vec(alpha * gx(x, g)); };
  if (auto hx = spec_->oracles.hess_x) s.oracles.hess_x = [hx, alpha](const Vec& x, const Vec& g) { return Mat(alpha * hx(x, g)); };
  return GoalModel(std::move(s));
}

GoalModel GoalModel::without_oracles() const {
  Spec s = *spec_;
  s.oracles = {};
  return GoalModel(std::move(s));
}

nlohmann::json GoalModel::to_json() const {
  return {{"id", id()}, {"params", params()}};
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

struct Stencil {
  std::vector<double> offsets;  // in units of h
  std::vector<double> weights;  // first derivative weights, in units of 1/h
};

const Stencil kCentral{{-1.0, 1.0}, {-0.5, 0.5}};
const Stencil kForward{{0.0, 1.0, 2.0}, {-1.5, 2.0, -0.5}};
const Stencil kBackward{{0.0, -1.0, -2.0}, {1.5, -2.0, 0.5}};

const Stencil& pick_stencil(double x, double h, double lo, double hi, bool& degraded) {
  const double eps = 1e-14 * std::max(1.0, std::abs(x));
  if (x - 2 * h < lo - eps) {
    degraded = true;
    return kForward;
  }
  if (x + 2 * h > hi + eps) {
    degraded = true;
    return kBackward;
  }
  return kCentral;
}

double step1(double v) { return std::max(1e-5, 1e-5 * std::abs(v)); }
double step2(double v) { return std::max(1e-4, 1e-3 * std::abs(v)); }

Vec numeric_grad(const GoalModel& goal, const Vec& x, const Vec& g, bool& degraded) {
  const auto& set = goal.decision_set();
  Vec grad(x.size());
  Vec probe = x;
  const double scale = x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = std::max(1e-8, 1e-5 * std::max(std::abs(x(i)), scale));
    const Stencil& st = pick_stencil(x(i), h, set.lo(i), set.hi(i), degraded);
    double acc = 0.0;
    for (std::size_t k = 0; k < st.offsets.size(); ++k) {
      probe(i) = x(i) + st.offsets[k] * h;
      acc += st.weights[k] * goal.evaluate(probe, g);
    }
    probe(i) = x(i);
    grad(i) = acc / h;
  }
  return grad;
}

Mat numeric_hess(const GoalModel& goal, const Vec& x, const Vec& g, bool& degraded) {
  const auto& set = goal.decision_set();
  const Eigen::Index n = x.size();
  Mat hess(n, n);
  Vec probe = x;
  const double f0 = goal.evaluate(x, g);
  std::vector<const Stencil*> st(static_cast<std::size_t>(n));
  Vec h(n);
  // Coordinates pinned at a bound (often 0) take the step of the largest
  // coordinate: a tiny absolute step there is swamped by rounding.
  const double scale = x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i) = std::max(1e-6, 1e-3 * std::max(std::abs(x(i)), scale));
    st[i] = &pick_stencil(x(i), h(i), set.lo(i), set.hi(i), degraded);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hi = h(i);
    if (st[i] == &kCentral) {
      double acc = -30.0 * f0;
      const double off[] = {-2, -1, 1, 2};
      const double w[] = {-1, 16, 16, -1};
      for (int k = 0; k < 4; ++k) {
        probe(i) = x(i) + off[k] * hi;
        acc += w[k] * goal.evaluate(probe, g);
      }
      hess(i, i) = acc / (12.0 * hi * hi);
    } else {
      const double dir = (st[i] == &kForward) ? 1.0 : -1.0;
      const double w[] = {2, -5, 4, -1};
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        probe(i) = x(i) + dir * k * hi;
        acc += w[k] * goal.evaluate(probe, g);
      }
      hess(i, i) = acc / (hi * hi);
    }
    probe(i) = x(i);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < st[i]->offsets.size(); ++a) {
        for (std::size_t b = 0; b < st[j]->offsets.size(); ++b) {
          probe(i) = x(i) + st[i]->offsets[a] * h(i);
          probe(j) = x(j) + st[j]->offsets[b] * h(j);
          acc += st[i]->weights[a] * st[j]->weights[b] * goal.evaluate(probe, g);
        }
      }
      probe(i) = x(i);
      probe(j) = x(j);
      hess(i, j) = hess(j, i) = acc / (h(i) * h(j));
    }
  }
  return hess;
}

Mat numeric_jac_chi(const GoalModel& goal, const Vec& g) {
  Mat jac(goal.decision_dim(), goal.param_dim());
  Vec probe = g;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double h = step1(g(j));
    probe(j) = g(j) + h;
    const Vec up = goal.decide(probe);
    probe(j) = g(j) - h;
    const Vec down = goal.decide(probe);
    probe(j) = g(j);
    jac.col(j) = (up - down) / (2 * h);
  }
  return jac;
}

std::vector<Mat> numeric_hess_chi(const GoalModel& goal, const Vec& g) {
  const int d = goal.decision_dim();
  const Eigen::Index p = g.size();
  std::vector<Mat> out(static_cast<std::size_t>(d), Mat::Zero(p, p));
  const Vec c0 = goal.decide(g);
  Vec probe = g;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double h = step2(g(j));
    Vec acc = -30.0 * c0;
    const double off[] = {-2, -1, 1, 2};
    const double w[] = {-1, 16, 16, -1};
    for (int k = 0; k < 4; ++k) {
      probe(j) = g(j) + off[k] * h;
      acc += w[k] * goal.decide(probe);
    }
    probe(j) = g(j);
    acc /= 12.0 * h * h;
    for (int i = 0; i < d; ++i) out[i](j, j) = acc(i);
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = j + 1; k < p; ++k) {
      const double hj = step2(g(j));
      const double hk = step2(g(k));
      Vec acc = Vec::Zero(d);
      for (int a = -1; a <= 1; a += 2) {
        for (int b = -1; b <= 1; b += 2) {
          probe(j) = g(j) + a * hj;
          probe(k) = g(k) + b * hk;
          acc += (a * b) * goal.decide(probe);
        }
      }
      probe(j) = g(j);
      probe(k) = g(k);
      acc /= 4.0 * hj * hk;
      for (int i = 0; i < d; ++i) out[i](j, k) = out[i](k, j) = acc(i);
    }
  }
  return out;
}

double block_mismatch(const Mat& a, const Mat& n) {
  const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  const double denom = scale > 1e-6 ? scale : 1.0;
  return a.size() ? (a - n).cwiseAbs().maxCoeff() / denom : 0.0;
}

}  // namespace

CurvatureBundle curvature(const GoalModel& goal, const Vec& g, DerivativeSource source) {
  if (g.size() != goal.param_dim()) throw ConfigError("curvature: parameter dimension mismatch");
  const auto& o = goal.oracles();
  if (source == DerivativeSource::analytic && !o.complete())
    throw ConfigError("curvature: goal '" + goal.id() + "' has no complete analytic oracles");
  const bool numeric = source == DerivativeSource::numeric;
  CurvatureBundle b;
  const Vec x = goal.decide(g);
  b.grad_f = (!numeric && o.grad_x) ? o.grad_x(x, g) : numeric_grad(goal, x, g, b.degraded);
  b.hess_f = (!numeric && o.hess_x) ? o.hess_x(x, g) : numeric_hess(goal, x, g, b.degraded);
  b.jac_chi = (!numeric && o.jac_chi) ? o.jac_chi(g) : numeric_jac_chi(goal, g);
  b.hess_chi = (!numeric && o.hess_chi) ? o.hess_chi(g) : numeric_hess_chi(goal, g);
  b.analytic = !numeric && o.complete();
  return b;
}

double CurvatureMismatch::worst() const { return std::max({grad, hess_f, jac_chi, hess_chi}); }

CurvatureMismatch cross_validate(const GoalModel& goal, const Vec& g) {
  const CurvatureBundle a = curvature(goal, g, DerivativeSource::analytic);
  const CurvatureBundle n = curvature(goal, g, DerivativeSource::numeric);
  CurvatureMismatch m;
  m.grad = block_mismatch(a.grad_f, n.grad_f);
  m.hess_f = block_mismatch(a.hess_f, n.hess_f);
  m.jac_chi = block_mismatch(a.jac_chi, n.jac_chi);
  for (std::size_t i = 0; i < a.hess_chi.size(); ++i)
    m.hess_chi = std::max(m.hess_chi, block_mismatch(a.hess_chi[i], n.hess_chi[i]));
  return m;
}

double scalar_x_derivative(const GoalModel& goal, const Vec& g, int order) {
  if (goal.decision_dim() != 1 || goal.param_dim() != 1)
    throw ConfigError("scalar_x_derivative: scalar goals only");
  if (order < 1 || order > 4) throw ConfigError("scalar_x_derivative: order must be in 1..4");
  const Vec xv = goal.decide(g);
  const double x = xv(0);
  const auto& o = goal.oracles();
  if (order == 1 && o.grad_x) return o.grad_x(xv, g)(0);
  if (order == 2 && o.hess_x) return o.hess_x(xv, g)(0, 0);
  auto f = [&](double t) { return goal.evaluate(scalar_vec(t), g); };
  const double lo = goal.decision_set().lo(0);
  switch (order) {
    case 1: {
      const double h = step1(x);
      if (x - h < lo) return (-3 * f(x) + 4 * f(x + h) - f(x + 2 * h)) / (2 * h);
      return (f(x + h) - f(x - h)) / (2 * h);
    }
    case 2: {
      const double h = step2(x);
      if (x - 2 * h < lo) return (2 * f(x) - 5 * f(x + h) + 4 * f(x + 2 * h) - f(x + 3 * h)) / (h * h);
      return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
    }
    case 3: {
      const double h = std::max(1e-3, 1e-2 * std::abs(x));
      if (x - 2 * h < lo)
        return (-5 * f(x) + 18 * f(x + h) - 24 * f(x + 2 * h) + 14 * f(x + 3 * h) - 3 * f(x + 4 * h)) /
               (2 * h * h * h);
      return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h * h * h);
    }
    default: {
      const double h = std::max(1e-3, 1e-2 * std::abs(x));
      if (x - 2 * h < lo)
        return (f(x) - 4 * f(x + h) + 6 * f(x + 2 * h) - 4 * f(x + 3 * h) + f(x + 4 * h)) / (h * h * h * h);
      return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / (h * h * h * h);
    }
  }
}

int detect_kappa(const GoalModel& goal, const SourceModel& source, int probes, std::uint64_t seed) {
  if (goal.decision_dim() != 1 || goal.param_dim() != 1) throw ConfigError("detect_kappa: requires d = p = 1");
  if (probes < 1) throw ConfigError("detect_kappa: probes must be >= 1");
  const Mat draws = source.sample(static_cast<std::size_t>(probes), seed);
  std::vector<int> hits(5, 0);
  int used = 0;
  for (Eigen::Index k = 0; k < draws.cols(); ++k) {
    const Vec g = draws.col(k);
    if (!goal.smooth_at(g)) continue;
    ++used;
    const double x = goal.decide(g)(0);
    const double s = std::max(std::abs(x), 1e-3);
    const double fval = std::abs(goal.evaluate(scalar_vec(x), g));
    for (int i = 1; i <= 4; ++i) {
      const double tol = 1e-6 * std::max(1.0, fval) / std::pow(s, i);
      if (std::abs(scalar_x_derivative(goal, g, i)) > tol) ++hits[i];
    }
  }
  if (used == 0) throw NumericError("detect_kappa: every probe fell on a kink");
  for (int i = 1; i <= 4; ++i) {
    if (hits[i] >= 0.99 * used) return i;
  }
  throw NumericError("detect_kappa: no derivative order <= 4 is non-vanishing for goal '" + goal.id() + "'");
}

Vec projected_gradient_decide(const GoalModel& goal, const Vec& g, const Vec& x0, const ProjectedGradientOptions& opt) {
  const auto& set = goal.decision_set();
  Vec x = set.project(x0);
  double fx = goal.evaluate(x, g);
  double t = opt.initial_step;
  bool degraded = false;
  for (int it = 0; it < opt.max_iters; ++it) {
    const Vec grad = goal.oracles().grad_x ? goal.oracles().grad_x(x, g) : numeric_grad(goal, x, g, degraded);
    t = std::min(t * 2.0, 1e6);
    Vec next;
    double fn = 0.0;
    for (int ls = 0; ls < 80; ++ls) {
      next = set.project(x - t * grad);
      fn = goal.evaluate(next, g);
      const Vec d = next - x;
      if (fn <= fx + grad.dot(d) + d.squaredNorm() / (2 * t)) break;
      t *= 0.5;
    }
    const double step = (next - x).norm();
    if (fn <= fx) {
      x = next;
      fx = fn;
    }
    if (step < opt.step_tol) break;
  }
  return x;
}

}  // namespace goq

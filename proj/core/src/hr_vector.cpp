#include "goq/hr_vector.hpp"

#include "goq/jacobi.hpp"
#include "goq/numerics.hpp"
#include "goq/prob_model.hpp"
#include "goq/quantizer.hpp"
#include "goq/rng.hpp"

#include <cmath>
#include <numbers>

namespace goq {

WeightMatrices weight_matrices(const GoalModel& goal, const Vec& g, bool spectrum, DerivativeSource source) {
  const CurvatureBundle c = curvature(goal, g, source);
  const double scale = std::max(1.0, c.hess_f.cwiseAbs().maxCoeff());
  if (asymmetry(c.hess_f) > 1e-6 * scale) throw NumericError("weight_matrices: Hessian of f is not symmetric");
  WeightMatrices w;
  w.A = c.jac_chi.transpose() * c.hess_f * c.jac_chi;
  w.A = 0.5 * (w.A + w.A.transpose());
  w.B = Mat::Zero(goal.param_dim(), goal.param_dim());
  for (int i = 0; i < goal.decision_dim(); ++i) w.B += c.grad_f(i) * c.hess_chi[i];
  w.B = 0.5 * (w.B + w.B.transpose());
  w.E = w.A + w.B;
  if (spectrum) {
    const SymmetricEigen ea = jacobi_eigen(w.A);
    w.lambda_min = ea.values(0);
    w.lambda_max = ea.values(ea.values.size() - 1);
    w.min_eigenvector = ea.vectors.col(0);
    const SymmetricEigen eh = jacobi_eigen(c.hess_f);
    w.nu_min = eh.values(0);
    w.nu_min_vector = eh.vectors.col(0);
  }
  return w;
}

double mu_p(int p) {
  switch (p) {
    case 1:
      return 1.0 / 12.0;
    case 2:
      return 5.0 / (36.0 * std::sqrt(3.0));
    case 3:
      return 0.0785;
    default:
      throw ConfigError("mu_p: only p = 1, 2, 3 are supported");
  }
}

double stretch_factor(const Mat& jac) {
  const SymmetricEigen e = jacobi_eigen(jac.transpose() * jac);
  return std::max(0.0, e.values(0));
}

OlBounds ol_bounds(const GoalModel& goal, const SourceModel& source, int M, const BoundsOptions& opt) {
  const int p = goal.param_dim();
  if (source.param_dim() != p) throw ConfigError("ol_bounds: source and goal dimensions differ");
  if (source.is_empirical()) throw ConfigError("ol_bounds: analytic source required");
  if (M < 1) throw ConfigError("ol_bounds: M must be >= 1");
  OlBounds b;
  b.mu = mu_p(p);
  b.M = M;
  b.p = p;
  b.d = goal.decision_dim();
  const bool refine = p >= b.d;
  const double e = static_cast<double>(p) / (p + 2);

  // Three integrands share one pass over the quadrature nodes.
  double acc[3] = {0, 0, 0};
  auto integrand = [&](const Vec& g) -> std::array<double, 3> {
    const double phi = source.pdf(g);
    if (phi <= 0) return {0, 0, 0};
    const WeightMatrices w = weight_matrices(goal, g);
    std::array<double, 3> v{std::pow(std::max(0.0, w.lambda_min) * phi, e), std::pow(std::max(0.0, w.lambda_max) * phi, e), 0.0};
    if (refine) {
      const CurvatureBundle c = curvature(goal, g);
      v[2] = std::pow(std::max(0.0, w.nu_min * stretch_factor(c.jac_chi)) * phi, e);
    }
    return v;
  };
  for (int k = 0; k < 3; ++k) {
    if (k == 2 && !refine) break;
    // Separate passes keep the integration helpers scalar; the cost is a
    // few hundred thousand oracle calls at most.
    auto f = [&, k](const Vec& g) { return integrand(g)[k]; };
    if (p == 1)
      acc[k] = integrate_box(f, source.support());
    else if (p == 2 && opt.grid_panels > 0)
      acc[k] = integrate_box2(f, source.support(), opt.grid_panels);
    else
      acc[k] = integrate_box_mc(f, source.support(), opt.mc_points, opt.seed);
  }
  const double pre = p * b.mu / 2.0 * std::pow(static_cast<double>(M), -2.0 / p);
  const double outer = (p + 2.0) / p;
  b.lower = pre * std::pow(acc[0], outer);
  b.upper = pre * std::pow(acc[1], outer);
  if (refine) b.refined_lower = pre * std::pow(acc[2], outer);
  return b;
}

MonteCarloEstimate hr_equivalent(const GoalModel& goal, const Quantizer& q, const SourceModel& source, std::size_t n,
                                 std::uint64_t seed, int threads) {
  if (q.dim() != goal.param_dim()) throw ConfigError("hr_equivalent: quantizer and goal dimensions differ");
  const Mat draws = source.sample(n, seed);
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = chunk_count(n, kChunk);
  std::vector<double> s1(chunks, 0.0), s2(chunks, 0.0);
  for_each_chunk(
      n, kChunk,
      [&](std::size_t c, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
          const Vec g = draws.col(static_cast<Eigen::Index>(k));
          const Vec d = g - q.quantize(g);
          const double v = 0.5 * d.dot(weight_matrices(goal, g, false).A * d);
          s1[c] += v;
          s2[c] += v * v;
        }
      },
      threads);
  double t1 = 0, t2 = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    t1 += s1[c];
    t2 += s2[c];
  }
  MonteCarloEstimate out;
  out.n = n;
  out.mean = t1 / n;
  const double var = n > 1 ? std::max(0.0, (t2 - n * out.mean * out.mean) / (n - 1)) : 0.0;
  out.std_error = std::sqrt(var / n);
  return out;
}

nlohmann::json to_json(const OlBounds& b) {
  nlohmann::json j = {{"p", b.p}, {"d", b.d}, {"M", b.M}, {"mu_p", b.mu}, {"lower", b.lower}, {"upper", b.upper}};
  if (b.refined_lower) j["refined_lower"] = *b.refined_lower;
  return j;
}

}  // namespace goq

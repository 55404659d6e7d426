#include "goq/goq_solver.hpp"

#include "goq/density.hpp"
#include "goq/hr_scalar.hpp"
#include "goq/hr_vector.hpp"
#include "goq/jacobi.hpp"
#include "goq/numerics.hpp"
#include "goq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace goq {

std::string to_string(LossMode mode) { return mode == LossMode::approx ? "approx-Ltilde" : "exact-L"; }

LossMode loss_mode_from_string(const std::string& s) {
  if (s == "approx-Ltilde" || s == "approx") return LossMode::approx;
  if (s == "exact-L" || s == "exact") return LossMode::exact;
  throw ConfigError("unknown loss mode '" + s + "'");
}

InitRule init_rule_from_string(const std::string& s) {
  if (s == "auto") return InitRule::automatic;
  if (s == "density-quantile") return InitRule::density_quantile;
  if (s == "kmeans-seed") return InitRule::kmeans_seed;
  if (s == "explicit") return InitRule::explicit_reps;
  throw ConfigError("unknown init rule '" + s + "'");
}

void SolverConfig::validate() const {
  if (M < 1) throw ConfigError("solver: M must be >= 1");
  if (max_iters < 1) throw ConfigError("solver: max_iters must be >= 1");
  if (epsilon < 0) throw ConfigError("solver: epsilon must be > 0");
  if (!(step.beta > 0 && step.beta < 1)) throw ConfigError("solver: beta must be in (0, 1)");
  if (step.kind == StepRule::Kind::fixed && !(step.r > 0)) throw ConfigError("solver: fixed step needs r > 0");
  if (inner_steps < 1) throw ConfigError("solver: inner_steps must be >= 1");
  if (mc_points < 1) throw ConfigError("solver: mc_points must be >= 1");
  if (restarts < 1) throw ConfigError("solver: restarts must be >= 1");
  if (init == InitRule::explicit_reps && explicit_init.cols() != M)
    throw ConfigError("solver: explicit init must have M columns");
}

double individual_loss(const GoalModel& goal, const Vec& g, const Vec& z, LossMode mode) {
  if (mode == LossMode::exact) return goal.exact_loss(g, z);
  const Vec d = g - z;
  return d.dot(weight_matrices(goal, g, false).E * d);
}

namespace {

constexpr std::size_t kChunk = 512;

class Engine {
 public:
  Engine(const GoalModel& goal, const Mat& pts, const Box& support, const SolverConfig& cfg)
      : goal_(goal), pts_(pts), support_(support), cfg_(cfg), p_(static_cast<int>(pts.rows())),
        n_(static_cast<std::size_t>(pts.cols())) {
    if (p_ != goal.param_dim()) throw ConfigError("solver: points and goal dimensions differ");
    if (n_ == 0) throw ConfigError("solver: no training points");
    if (cfg.loss == LossMode::approx) {
      e_.resize(p_, p_ * static_cast<Eigen::Index>(n_));
      for_each_chunk(
          n_, kChunk,
          [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
              const Vec g = pts_.col(static_cast<Eigen::Index>(i));
              Mat e = cfg_.metric ? cfg_.metric(g) : weight_matrices(goal_, g, false).E;
              if (!e.allFinite()) throw NumericError("solver: non-finite weight matrix at g = " + describe(g));
              e_.block(0, static_cast<Eigen::Index>(i) * p_, p_, p_) = e;
            }
          },
          cfg.threads);
    } else {
      fstar_.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        const Vec g = pts_.col(static_cast<Eigen::Index>(i));
        fstar_[i] = goal_.evaluate(goal_.decide(g), g);
        if (!std::isfinite(fstar_[i])) throw NumericError("solver: decision failed at g = " + describe(g));
      }
    }
  }

  static std::string describe(const Vec& g) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < g.size(); ++i) s += (i ? ", " : "") + fmt_sig(g(i), 6);
    return s + ")";
  }

  auto e(std::size_t i) const { return e_.block(0, static_cast<Eigen::Index>(i) * p_, p_, p_); }

  double approx_cost(std::size_t i, const Vec& z) const {
    const Vec d = pts_.col(static_cast<Eigen::Index>(i)) - z;
    return d.dot(e(i) * d);
  }

  /// Region step. Returns the mean loss; fills labels and per-point cost.
  double assign(const Mat& reps, std::vector<int>& label, std::vector<double>& cost) const {
    const int M = static_cast<int>(reps.cols());
    label.assign(n_, 0);
    cost.assign(n_, 0.0);
    std::vector<Vec> decisions;
    if (cfg_.loss == LossMode::exact)
      for (int m = 0; m < M; ++m) decisions.push_back(goal_.decide(reps.col(m)));
    // Scalar approx mode with E > 0 is nearest-neighbour: binary search.
    std::vector<int> order(static_cast<std::size_t>(M));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sorted;
    const bool scalar = cfg_.loss == LossMode::approx && p_ == 1;
    if (scalar) {
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return reps(0, a) < reps(0, b); });
      for (int k : order) sorted.push_back(reps(0, k));
    }
    std::vector<double> partial(chunk_count(n_, kChunk), 0.0);
    for_each_chunk(
        n_, kChunk,
        [&](std::size_t c, std::size_t begin, std::size_t end) {
          double s = 0.0;
          for (std::size_t i = begin; i < end; ++i) {
            int best = 0;
            double bv = std::numeric_limits<double>::infinity();
            if (scalar && e(i)(0, 0) > 0) {
              const double g = pts_(0, static_cast<Eigen::Index>(i));
              const auto it = std::lower_bound(sorted.begin(), sorted.end(), g);
              const auto k = it - sorted.begin();
              for (auto j : {k - 1, k}) {
                if (j < 0 || j >= M) continue;
                const double v = approx_cost(i, reps.col(order[j]));
                if (v < bv || (v == bv && order[j] < best)) {
                  bv = v;
                  best = order[j];
                }
              }
            } else {
              for (int m = 0; m < M; ++m) {
                const double v = cfg_.loss == LossMode::exact
                                     ? goal_.evaluate(decisions[m], pts_.col(static_cast<Eigen::Index>(i))) - fstar_[i]
                                     : approx_cost(i, reps.col(m));
                if (v < bv) {
                  bv = v;
                  best = m;
                }
              }
            }
            if (!std::isfinite(bv))
              throw NumericError("solver: non-finite loss at g = " + describe(pts_.col(static_cast<Eigen::Index>(i))));
            label[i] = best;
            cost[i] = bv;
            s += bv;
          }
          partial[c] = s;
        },
        cfg_.threads);
    double total = 0.0;
    for (double v : partial) total += v;
    return total / static_cast<double>(n_);
  }

  /// Moves representatives of empty regions onto the worst-served points.
  int repair(Mat& reps, const std::vector<int>& label, std::vector<double> cost) const {
    const int M = static_cast<int>(reps.cols());
    std::vector<std::size_t> count(static_cast<std::size_t>(M), 0);
    for (int l : label) ++count[l];
    int repairs = 0;
    for (int m = 0; m < M; ++m) {
      if (count[m] > 0) continue;
      std::size_t worst = 0;
      for (std::size_t i = 1; i < n_; ++i)
        if (cost[i] > cost[worst]) worst = i;
      if (!(cost[worst] > 0)) break;
      reps.col(m) = pts_.col(static_cast<Eigen::Index>(worst));
      cost[worst] = 0.0;
      ++repairs;
    }
    return repairs;
  }

  /// Gradient descent on the region quadratic z^T S z - 2 b^T z + c.
  Vec descend(const Vec& z0, const std::vector<std::size_t>& members) const {
    Mat S = Mat::Zero(p_, p_);
    Vec b = Vec::Zero(p_);
    double c = 0.0;
    for (std::size_t i : members) {
      const Vec g = pts_.col(static_cast<Eigen::Index>(i));
      const Vec eg = e(i) * g;
      S += e(i);
      b += eg;
      c += g.dot(eg);
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    S *= inv_n;
    b *= inv_n;
    c *= inv_n;
    S = 0.5 * (S + S.transpose());
    auto q = [&](const Vec& z) { return z.dot(S * z) - 2 * b.dot(z) + c; };
    double r0 = cfg_.step.r;
    if (!(r0 > 0)) {
      const double lmax = p_ == 1 ? S(0, 0) : jacobi_eigen(S).values(p_ - 1);
      if (!(lmax > 0)) return z0;
      r0 = 1.0 / (2.0 * lmax);
    }
    Vec z = z0;
    double qz = q(z);
    for (int step = 0; step < cfg_.inner_steps; ++step) {
      const Vec grad = 2.0 * (S * z - b);
      const double gg = grad.squaredNorm();
      if (!(gg > 0)) break;
      double r = r0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, r *= cfg_.step.beta) {
        const Vec cand = z - r * grad;
        if (!support_.contains(cand)) continue;  // step must keep z inside the support
        const double qc = q(cand);
        if (cfg_.step.kind == StepRule::Kind::fixed || qc <= qz - cfg_.step.c * r * gg) {
          moved = qc <= qz || cfg_.step.kind == StepRule::Kind::fixed;
          if (moved) {
            z = cand;
            qz = qc;
          }
          break;
        }
      }
      if (!moved) break;
    }
    return z;
  }

  /// Compass search on the exact region loss.
  Vec pattern(const Vec& z0, const std::vector<std::size_t>& members) const {
    if (members.empty()) return z0;
    auto loss = [&](const Vec& z) {
      const Vec x = goal_.decide(z);
      double s = 0.0;
      for (std::size_t i : members) s += goal_.evaluate(x, pts_.col(static_cast<Eigen::Index>(i)));
      return s;
    };
    double radius = 0.0;
    for (std::size_t i : members) radius += (pts_.col(static_cast<Eigen::Index>(i)) - z0).squaredNorm();
    radius = std::sqrt(radius / members.size());
    const double width = (support_.hi - support_.lo).maxCoeff();
    radius = std::clamp(radius, 1e-3 * width, 0.5 * width);
    Vec z = z0;
    double best = loss(z);
    int evals = 0;
    constexpr int kMaxEvals = 20000;
    while (radius > cfg_.pattern_tol && evals < kMaxEvals) {
      bool improved = false;
      for (int j = 0; j < p_ && evals < kMaxEvals; ++j) {
        for (double dir : {1.0, -1.0}) {
          Vec cand = z;
          cand(j) += dir * radius;
          cand = support_.clamp(cand);
          if (cand == z) continue;
          const double v = loss(cand);
          ++evals;
          if (v < best) {
            best = v;
            z = cand;
            improved = true;
            break;
          }
        }
      }
      if (!improved) radius *= 0.5;
    }
    return z;
  }

  Mat init(const SourceModel* source, std::uint64_t seed) const {
    const int M = cfg_.M;
    InitRule rule = cfg_.init;
    if (rule == InitRule::automatic) rule = p_ == 1 ? InitRule::density_quantile : InitRule::kmeans_seed;
    Mat reps(p_, M);
    if (rule == InitRule::explicit_reps) {
      for (int m = 0; m < M; ++m) reps.col(m) = support_.clamp(cfg_.explicit_init.col(m));
      return reps;
    }
    if (rule == InitRule::density_quantile) {
      if (p_ != 1) throw ConfigError("solver: density-quantile init needs a scalar parameter");
      if (source && !source->is_empirical()) {
        DensityProfile rho = DensityProfile::uniform(support_.lo(0), support_.hi(0));
        try {
          rho = optimal_density(goal_, *source, 2);
        } catch (const std::exception&) {
          rho = DensityProfile::from_shape(support_.lo(0), support_.hi(0),
                                           [source](double t) { return source->pdf(scalar_vec(t)); });
        }
        for (int m = 0; m < M; ++m) reps(0, m) = rho.quantile((m + 0.5) / M);
        return reps;
      }
      std::vector<double> v(pts_.data(), pts_.data() + n_);
      std::sort(v.begin(), v.end());
      for (int m = 0; m < M; ++m)
        reps(0, m) = v[std::min(n_ - 1, static_cast<std::size_t>((m + 0.5) / M * static_cast<double>(n_)))];
      return reps;
    }
    // Loss-weighted D^2 seeding.
    Rng rng(seed);
    reps.col(0) = pts_.col(static_cast<Eigen::Index>(rng.index(n_)));
    std::vector<double> w(n_);
    auto cost = [&](std::size_t i, const Vec& z) {
      if (cfg_.loss == LossMode::approx) return std::max(0.0, approx_cost(i, z));
      return std::max(0.0, goal_.evaluate(goal_.decide(z), pts_.col(static_cast<Eigen::Index>(i))) - fstar_[i]);
    };
    for (std::size_t i = 0; i < n_; ++i) w[i] = cost(i, reps.col(0));
    for (int m = 1; m < M; ++m) {
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      std::size_t pick = 0;
      if (total > 0) {
        const double u = rng.uniform() * total;
        double acc = 0.0;
        pick = n_ - 1;
        for (std::size_t i = 0; i < n_; ++i) {
          acc += w[i];
          if (acc > u) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<std::size_t>(rng.index(n_));
      }
      reps.col(m) = pts_.col(static_cast<Eigen::Index>(pick));
      const Vec zm = reps.col(m);
      if (cfg_.loss == LossMode::exact) {
        const Vec x = goal_.decide(zm);
        for (std::size_t i = 0; i < n_; ++i)
          w[i] = std::min(w[i], std::max(0.0, goal_.evaluate(x, pts_.col(static_cast<Eigen::Index>(i))) - fstar_[i]));
      } else {
        for (std::size_t i = 0; i < n_; ++i) w[i] = std::min(w[i], cost(i, zm));
      }
    }
    return reps;
  }

  SolveResult run(Mat reps, int restart) const {
    SolveResult out;
    out.trace.restart = restart;
    const double eps = cfg_.epsilon > 0 ? cfg_.epsilon : (p_ == 1 ? 1e-8 : 1e-6);
    std::vector<int> label;
    std::vector<double> cost;
    double disp = 0.0;
    std::vector<std::vector<std::size_t>> settled;
    std::vector<Vec> settled_at;
    for (int t = 0;; ++t) {
      double loss = assign(reps, label, cost);
      const int repairs = repair(reps, label, cost);
      if (repairs > 0) loss = assign(reps, label, cost);
      out.trace.records.push_back({t, loss, disp, repairs});
      out.trace.final_loss = loss;
      if (t >= cfg_.max_iters || out.trace.converged) break;

      std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(reps.cols()));
      for (std::size_t i = 0; i < n_; ++i) members[label[i]].push_back(i);
      Mat next = reps;
      for_each_chunk(
          static_cast<std::size_t>(reps.cols()), 1,
          [&](std::size_t m, std::size_t, std::size_t) {
            if (members[m].empty()) return;
            // Pattern search already stalled on this exact region.
            if (cfg_.loss == LossMode::exact && m < settled.size() && settled[m] == members[m] &&
                settled_at[m] == reps.col(static_cast<Eigen::Index>(m)))
              return;
            next.col(static_cast<Eigen::Index>(m)) = cfg_.loss == LossMode::approx
                                                         ? descend(reps.col(static_cast<Eigen::Index>(m)), members[m])
                                                         : pattern(reps.col(static_cast<Eigen::Index>(m)), members[m]);
          },
          cfg_.threads);
      if (cfg_.loss == LossMode::exact) {
        settled = members;
        settled_at.assign(static_cast<std::size_t>(reps.cols()), Vec());
        for (Eigen::Index m = 0; m < reps.cols(); ++m) settled_at[static_cast<std::size_t>(m)] = next.col(m);
      }
      const double moved = (next - reps).squaredNorm();
      disp = (next - reps).colwise().norm().maxCoeff();
      reps = std::move(next);
      if (moved < eps) out.trace.converged = true;
    }
    out.labels = std::move(label);
    out.quantizer = Quantizer::plain(reps, support_, "goq");
    return out;
  }

 private:
  const GoalModel& goal_;
  const Mat& pts_;
  Box support_;
  const SolverConfig& cfg_;
  int p_;
  std::size_t n_;
  Mat e_;
  std::vector<double> fstar_;
};

}  // namespace

SolveResult solve_on(const GoalModel& goal, const Mat& points, const Box& support, const SolverConfig& cfg,
                     const SourceModel* source) {
  cfg.validate();
  const Engine engine(goal, points, support, cfg);
  std::optional<SolveResult> best;
  for (int k = 0; k < cfg.restarts; ++k) {
    const std::uint64_t seed = derive_seed(cfg.seed, "restart-" + std::to_string(k));
    SolveResult r = engine.run(engine.init(source, seed), k);
    if (!best || r.trace.final_loss < best->trace.final_loss) best = std::move(r);
  }
  SolveResult out = std::move(*best);
  const Mat reps = out.quantizer.representatives();
  if (cfg.loss == LossMode::exact) {
    out.quantizer = Quantizer::goal_loss(reps, support, goal, "goq-exact");
  } else {
    MetricFn metric = cfg.metric;
    nlohmann::json info = {{"matrix", "custom"}};
    if (!metric) {
      metric = [goal](const Vec& g) { return weight_matrices(goal, g, false).E; };
      info = {{"goal", goal.to_json()}, {"matrix", "E"}};
    }
    out.quantizer = Quantizer::weighted(reps, support, std::move(metric), std::move(info), "goq");
  }
  out.quantizer.set_seed(cfg.seed);
  return out;
}

SolveResult solve(const GoalModel& goal, const SourceModel& source, const SolverConfig& cfg) {
  if (source.param_dim() != goal.param_dim()) throw ConfigError("solve: source and goal dimensions differ");
  const Mat points =
      source.is_empirical() ? source.data() : source.sample(cfg.mc_points, derive_seed(cfg.seed, "solve-sample"));
  return solve_on(goal, points, source.support(), cfg, &source);
}

SolveResult cluster(const GoalModel& goal, const SourceModel& dataset, const SolverConfig& cfg) {
  if (!dataset.is_empirical()) throw ConfigError("cluster: an empirical dataset is required");
  SolverConfig c = cfg;
  c.loss = LossMode::exact;
  SolveResult r = solve_on(goal, dataset.data(), dataset.support(), c, &dataset);
  r.quantizer.set_provenance("goq-cluster");
  return r;
}

CsvTable trace_csv(const SolveTrace& trace) {
  CsvTable t({"iter", "loss", "max_disp", "repairs"});
  for (const auto& r : trace.records)
    t.add_row({std::to_string(r.iteration), fmt_num(r.loss), fmt_num(r.max_disp), std::to_string(r.repairs)});
  return t;
}

}  // namespace goq

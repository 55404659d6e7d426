#include "goq/quantizer.hpp"

#include "goq/density.hpp"
#include "goq/hr_vector.hpp"
#include "goq/numerics.hpp"
#include "goq/prob_model.hpp"
#include "goq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace goq {

std::string to_string(RegionRule rule) {
  switch (rule) {
    case RegionRule::plain:
      return "plain-euclidean";
    case RegionRule::weighted:
      return "weighted";
    case RegionRule::scalar_intervals:
      return "scalar-intervals";
    case RegionRule::goal_loss:
      return "goal-loss";
  }
  return "?";
}

RegionRule region_rule_from_string(const std::string& s) {
  if (s == "plain-euclidean") return RegionRule::plain;
  if (s == "weighted") return RegionRule::weighted;
  if (s == "scalar-intervals") return RegionRule::scalar_intervals;
  if (s == "goal-loss") return RegionRule::goal_loss;
  throw ConfigError("unknown region rule '" + s + "'");
}

Quantizer Quantizer::plain(Mat reps, Box support, std::string provenance) {
  if (reps.cols() < 1) throw ConfigError("quantizer: M must be >= 1");
  if (reps.rows() != support.dim()) throw ConfigError("quantizer: representative dimension does not match support");
  Quantizer q;
  q.rule_ = RegionRule::plain;
  q.reps_ = std::move(reps);
  q.support_ = std::move(support);
  q.provenance_ = std::move(provenance);
  return q;
}

Quantizer Quantizer::scalar_intervals(std::vector<double> boundaries, std::vector<double> reps, std::string provenance) {
  if (reps.empty()) throw ConfigError("quantizer: M must be >= 1");
  if (boundaries.size() != reps.size() + 1) throw ConfigError("quantizer: need M + 1 boundaries");
  for (std::size_t m = 0; m + 1 < boundaries.size(); ++m) {
    if (!(boundaries[m] < boundaries[m + 1])) throw ConfigError("quantizer: boundaries must be strictly increasing");
  }
  Quantizer q;
  q.rule_ = RegionRule::scalar_intervals;
  q.reps_ = Eigen::Map<const Mat>(reps.data(), 1, static_cast<Eigen::Index>(reps.size()));
  q.support_ = Box::interval(boundaries.front(), boundaries.back());
  q.boundaries_ = std::move(boundaries);
  q.provenance_ = std::move(provenance);
  return q;
}

Quantizer Quantizer::weighted(Mat reps, Box support, MetricFn metric, nlohmann::json metric_info, std::string provenance) {
  if (!metric) throw ConfigError("quantizer: weighted rule needs a metric oracle");
  Quantizer q = plain(std::move(reps), std::move(support), std::move(provenance));
  q.rule_ = RegionRule::weighted;
  q.metric_ = std::move(metric);
  q.metric_info_ = std::move(metric_info);
  return q;
}

Quantizer Quantizer::goal_loss(Mat reps, Box support, const GoalModel& goal, std::string provenance) {
  if (goal.param_dim() != support.dim()) throw ConfigError("quantizer: goal dimension does not match support");
  Quantizer q = plain(std::move(reps), std::move(support), std::move(provenance));
  q.rule_ = RegionRule::goal_loss;
  q.goal_ = std::make_shared<const GoalModel>(goal);
  q.metric_info_ = {{"goal", goal.to_json()}};
  for (int m = 0; m < q.size(); ++m) q.decisions_.push_back(goal.decide(q.reps_.col(m)));
  return q;
}

Quantizer& Quantizer::set_provenance(std::string tag) {
  provenance_ = std::move(tag);
  return *this;
}

Quantizer& Quantizer::set_seed(std::uint64_t seed) {
  seed_ = seed;
  return *this;
}

int Quantizer::encode_with_metric(const Vec& g, const Mat& e) const {
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int m = 0; m < size(); ++m) {
    const Vec d = g - reps_.col(m);
    const double v = d.dot(e * d);
    if (v < best_v) {
      best_v = v;
      best = m;
    }
  }
  return best;
}

int Quantizer::encode(const Vec& raw) const {
  if (raw.size() != dim()) throw ConfigError("encode: dimension mismatch");
  const Vec* gp = &raw;
  Vec clamped;
  if (!support_.contains(raw, 1e-12)) {
    clamped = support_.clamp(raw);
    gp = &clamped;
    ++*clamped_;
  }
  const Vec& g = *gp;
  switch (rule_) {
    case RegionRule::scalar_intervals: {
      // Region m is [b_m, b_{m+1}); the last region also holds b_M.
      const auto it = std::upper_bound(boundaries_.begin() + 1, boundaries_.end() - 1, g(0));
      return static_cast<int>(it - (boundaries_.begin() + 1));
    }
    case RegionRule::weighted:
      return encode_with_metric(g, metric_(g));
    case RegionRule::goal_loss: {
      int best = 0;
      double best_v = std::numeric_limits<double>::infinity();
      for (int m = 0; m < size(); ++m) {
        const double v = goal_->evaluate(decisions_[m], g);
        if (v < best_v) {
          best_v = v;
          best = m;
        }
      }
      return best;
    }
    case RegionRule::plain:
      break;
  }
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int m = 0; m < size(); ++m) {
    const double v = (g - reps_.col(m)).squaredNorm();
    if (v < best_v) {
      best_v = v;
      best = m;
    }
  }
  return best;
}

void Quantizer::validate() const {
  for (int m = 0; m < size(); ++m) {
    if (!support_.contains(reps_.col(m), 1e-9))
      throw NumericError("quantizer: representative " + std::to_string(m) + " outside support");
    for (int k = 0; k < m; ++k) {
      if (reps_.col(m) == reps_.col(k)) throw NumericError("quantizer: duplicate representatives");
    }
  }
  if (rule_ == RegionRule::scalar_intervals) {
    for (int m = 0; m < size(); ++m) {
      if (!(boundaries_[m] < reps_(0, m) && reps_(0, m) < boundaries_[m + 1]))
        throw NumericError("quantizer: representative " + std::to_string(m) + " outside its interval");
    }
  }
  for (int m = 0; m < size(); ++m) {
    if (encode(decode(m)) != m)
      throw NumericError("quantizer: representative " + std::to_string(m) + " is not in its own region");
  }
}

nlohmann::json Quantizer::to_json() const {
  nlohmann::json reps = nlohmann::json::array();
  for (int m = 0; m < size(); ++m) {
    nlohmann::json z = nlohmann::json::array();
    for (int i = 0; i < dim(); ++i) z.push_back(reps_(i, m));
    reps.push_back(std::move(z));
  }
  nlohmann::json j = {{"M", size()},
                      {"dim", dim()},
                      {"representatives", std::move(reps)},
                      {"rule", to_string(rule_)},
                      {"support", {{"lo", std::vector<double>(support_.lo.data(), support_.lo.data() + dim())},
                                   {"hi", std::vector<double>(support_.hi.data(), support_.hi.data() + dim())}}},
                      {"provenance", provenance_},
                      {"seed", seed_}};
  if (rule_ == RegionRule::scalar_intervals) j["boundaries"] = boundaries_;
  if (!metric_info_.is_null()) j["metric"] = metric_info_;
  return j;
}

Quantizer Quantizer::from_json(const nlohmann::json& j) {
  try {
    const RegionRule rule = region_rule_from_string(j.at("rule").get<std::string>());
    const auto reps_json = j.at("representatives");
    const int M = static_cast<int>(reps_json.size());
    if (M < 1 || j.at("M").get<int>() != M) throw ConfigError("quantizer json: M does not match representatives");
    const int dim = static_cast<int>(reps_json.at(0).size());
    Mat reps(dim, M);
    for (int m = 0; m < M; ++m) {
      if (static_cast<int>(reps_json[m].size()) != dim) throw ConfigError("quantizer json: ragged representatives");
      for (int i = 0; i < dim; ++i) reps(i, m) = reps_json[m][i].get<double>();
    }
    const auto lo = j.at("support").at("lo").get<std::vector<double>>();
    const auto hi = j.at("support").at("hi").get<std::vector<double>>();
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
      throw ConfigError("quantizer json: support dimension mismatch");
    Box support{Eigen::Map<const Vec>(lo.data(), dim), Eigen::Map<const Vec>(hi.data(), dim)};
    const std::string prov = j.value("provenance", "");
    Quantizer q;
    switch (rule) {
      case RegionRule::plain:
        q = plain(std::move(reps), std::move(support), prov);
        break;
      case RegionRule::scalar_intervals: {
        std::vector<double> r(reps.data(), reps.data() + M);
        q = scalar_intervals(j.at("boundaries").get<std::vector<double>>(), std::move(r), prov);
        break;
      }
      case RegionRule::weighted: {
        const auto& info = j.at("metric");
        const GoalModel goal = builtin_goal(info.at("goal").at("id").get<std::string>(), info.at("goal").at("params"));
        MetricFn metric = [goal](const Vec& g) { return weight_matrices(goal, g, false).E; };
        q = weighted(std::move(reps), std::move(support), std::move(metric), info, prov);
        break;
      }
      case RegionRule::goal_loss: {
        const auto& info = j.at("metric").at("goal");
        q = goal_loss(std::move(reps), std::move(support),
                      builtin_goal(info.at("id").get<std::string>(), info.at("params")), prov);
        break;
      }
    }
    q.seed_ = j.value("seed", std::uint64_t{0});
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("quantizer json: ") + e.what());
  }
}

Quantizer build_uniform_scalar(double lo, double hi, int M) {
  if (M < 1) throw ConfigError("build_uniform_scalar: M must be >= 1");
  if (!(lo < hi)) throw ConfigError("build_uniform_scalar: degenerate support");
  std::vector<double> b(static_cast<std::size_t>(M) + 1);
  std::vector<double> z(static_cast<std::size_t>(M));
  const double w = (hi - lo) / M;
  for (int m = 0; m <= M; ++m) b[m] = (m == M) ? hi : lo + m * w;
  for (int m = 0; m < M; ++m) z[m] = lo + (m + 0.5) * w;
  return Quantizer::scalar_intervals(std::move(b), std::move(z), "uniform");
}

Quantizer build_uniform_product(const Box& support, int levels) {
  if (levels < 1) throw ConfigError("build_uniform_product: levels must be >= 1");
  const int p = support.dim();
  const Eigen::Index M = static_cast<Eigen::Index>(std::pow(levels, p));
  Mat reps(p, M);
  for (Eigen::Index m = 0; m < M; ++m) {
    Eigen::Index rest = m;
    for (int i = 0; i < p; ++i) {
      const Eigen::Index k = rest % levels;
      rest /= levels;
      reps(i, m) = support.lo(i) + (k + 0.5) * (support.hi(i) - support.lo(i)) / levels;
    }
  }
  return Quantizer::plain(std::move(reps), support, "uniform-product");
}

Quantizer build_compander_scalar(const DensityProfile& rho, int M) {
  if (M < 1) throw ConfigError("build_compander_scalar: M must be >= 1");
  std::vector<double> b(static_cast<std::size_t>(M) + 1);
  std::vector<double> z(static_cast<std::size_t>(M));
  b.front() = rho.lo();
  b.back() = rho.hi();
  for (int m = 1; m < M; ++m) b[m] = rho.quantile(static_cast<double>(m) / M);
  for (int m = 0; m < M; ++m) z[m] = rho.quantile((m + 0.5) / M);
  return Quantizer::scalar_intervals(std::move(b), std::move(z), "compander");
}

// ---------------------------------------------------------------------------
// Lloyd-Max

namespace {

constexpr std::size_t kChunk = 1024;

/// Nearest representative for every point; returns the mean squared
/// distance. Chunked so the sum does not depend on the thread count.
double assign(const Mat& points, const Mat& reps, std::vector<int>& label, std::vector<double>& cost, int threads) {
  const std::size_t n = static_cast<std::size_t>(points.cols());
  label.resize(n);
  cost.resize(n);
  std::vector<double> partial(chunk_count(n, kChunk), 0.0);
  for_each_chunk(
      n, kChunk,
      [&](std::size_t c, std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
          int best = 0;
          double bv = std::numeric_limits<double>::infinity();
          for (Eigen::Index m = 0; m < reps.cols(); ++m) {
            const double v = (points.col(k) - reps.col(m)).squaredNorm();
            if (v < bv) {
              bv = v;
              best = static_cast<int>(m);
            }
          }
          label[k] = best;
          cost[k] = bv;
          s += bv;
        }
        partial[c] = s;
      },
      threads);
  double total = 0.0;
  for (double v : partial) total += v;
  return total / static_cast<double>(n);
}

Mat dsquared_seed(const Mat& points, int M, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = points.cols();
  Mat reps(points.rows(), M);
  reps.col(0) = points.col(static_cast<Eigen::Index>(rng.index(n)));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) d2[k] = (points.col(k) - reps.col(0)).squaredNorm();
  for (int m = 1; m < M; ++m) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index pick = 0;
    if (total > 0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index k = 0; k < n; ++k) {
        acc += d2[k];
        if (acc > u) {
          pick = k;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(n));
    }
    reps.col(m) = points.col(pick);
    for (Eigen::Index k = 0; k < n; ++k) d2[k] = std::min(d2[k], (points.col(k) - reps.col(m)).squaredNorm());
  }
  return reps;
}

LloydResult scalar_lloyd(const SourceModel& source, int M, const LloydConfig& cfg) {
  const double lo = source.support().lo(0);
  const double hi = source.support().hi(0);
  auto pdf = [&](double t) { return source.pdf(scalar_vec(t)); };
  const DensityProfile phi = DensityProfile::from_shape(lo, hi, pdf, 256);
  std::vector<double> z(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) z[m] = phi.quantile((m + 0.5) / M);

  QuadratureOptions qo;
  qo.panels = 2;
  LloydResult out;
  std::vector<double> b(static_cast<std::size_t>(M) + 1);
  auto boundaries = [&] {
    b.front() = lo;
    b.back() = hi;
    for (int m = 1; m < M; ++m) b[m] = 0.5 * (z[m - 1] + z[m]);
  };
  auto distortion = [&] {
    double d = 0.0;
    for (int m = 0; m < M; ++m) d += integrate([&](double t) { return (t - z[m]) * (t - z[m]) * pdf(t); }, b[m], b[m + 1], qo);
    return d;
  };
  for (int it = 0; it < cfg.max_iters; ++it) {
    boundaries();
    out.distortion.push_back(distortion());
    double moved = 0.0;
    for (int m = 0; m < M; ++m) {
      const double mass = integrate(pdf, b[m], b[m + 1], qo);
      double next = 0.5 * (b[m] + b[m + 1]);
      if (mass > 1e-300) next = integrate([&](double t) { return t * pdf(t); }, b[m], b[m + 1], qo) / mass;
      moved += (next - z[m]) * (next - z[m]);
      z[m] = next;
    }
    out.iterations = it + 1;
    if (moved < cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  boundaries();
  out.distortion.push_back(distortion());
  out.quantizer = Quantizer::scalar_intervals(b, z, "lloyd-max");
  return out;
}

}  // namespace

LloydResult kmeans_from(const Mat& points, const Box& support, Mat reps, const LloydConfig& cfg) {
  const Eigen::Index n = points.cols();
  const int M = static_cast<int>(reps.cols());
  if (M < 1) throw ConfigError("kmeans: M must be >= 1");
  if (n < 1) throw ConfigError("kmeans: no points");
  LloydResult out;
  std::vector<int> label;
  std::vector<double> cost;
  for (int it = 0;; ++it) {
    out.distortion.push_back(assign(points, reps, label, cost, cfg.threads));
    if (it >= cfg.max_iters || out.converged) break;
    Mat sum = Mat::Zero(points.rows(), M);
    std::vector<std::size_t> count(static_cast<std::size_t>(M), 0);
    for (Eigen::Index k = 0; k < n; ++k) {
      sum.col(label[k]) += points.col(k);
      ++count[label[k]];
    }
    Mat next = reps;
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (int m = 0; m < M; ++m) {
      if (count[m] > 0) {
        next.col(m) = sum.col(m) / static_cast<double>(count[m]);
        continue;
      }
      // Dead representative: move it to the worst-served point.
      Eigen::Index worst = -1;
      for (Eigen::Index k = 0; k < n; ++k)
        if (!taken[k] && (worst < 0 || cost[k] > cost[worst])) worst = k;
      if (worst >= 0 && cost[worst] > 0) {
        taken[worst] = 1;
        next.col(m) = points.col(worst);
        cost[worst] = 0.0;
        ++out.repairs;
      }
    }
    const double moved = (next - reps).squaredNorm();
    reps = std::move(next);
    out.iterations = it + 1;
    if (moved < cfg.epsilon) out.converged = true;
  }
  for (int m = 0; m < M; ++m) reps.col(m) = support.clamp(reps.col(m));
  out.quantizer = Quantizer::plain(std::move(reps), support, "lloyd-max");
  return out;
}

LloydResult kmeans(const Mat& points, const Box& support, int M, const LloydConfig& cfg, std::uint64_t seed) {
  if (M < 1) throw ConfigError("kmeans: M must be >= 1");
  LloydResult r = kmeans_from(points, support, dsquared_seed(points, M, seed), cfg);
  r.quantizer.set_seed(seed);
  return r;
}

LloydResult lloyd_max(const SourceModel& source, int M, const LloydConfig& cfg, std::uint64_t seed) {
  if (M < 1) throw ConfigError("lloyd_max: M must be >= 1");
  if (!source.is_empirical() && source.param_dim() == 1) {
    LloydResult r = scalar_lloyd(source, M, cfg);
    r.quantizer.set_seed(seed);
    return r;
  }
  const Mat points = source.is_empirical() ? source.data() : source.sample(cfg.mc_points, derive_seed(seed, "lloyd-sample"));
  return kmeans(points, source.support(), M, cfg, derive_seed(seed, "lloyd-init"));
}

}  // namespace goq

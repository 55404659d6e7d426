#include "goq/prob_model.hpp"

#include "goq/numerics.hpp"
#include "goq/rng.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace goq {

namespace {

using nlohmann::json;

// Unbounded laws are cut at this upper-tail mass per axis.
constexpr double kTailMass = 1e-6;

class ParamReader {
 public:
  ParamReader(std::string source, const json& params) : source_(std::move(source)), params_(params) {
    if (!params_.is_object()) throw ConfigError("source '" + source_ + "': params must be a JSON object");
  }

  bool has(const std::string& key) const { return params_.contains(key); }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!params_.contains(key)) return fallback;
    if (!params_[key].is_number()) throw ConfigError("source '" + source_ + "': param '" + key + "' must be a number");
    return params_[key].get<double>();
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    if (v != std::floor(v)) throw ConfigError("source '" + source_ + "': param '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!params_.contains(key)) return fallback;
    if (!params_[key].is_string()) throw ConfigError("source '" + source_ + "': param '" + key + "' must be a string");
    return params_[key].get<std::string>();
  }

  /// Scalar broadcast to `dim` entries, or an explicit array of that length.
  Vec vector(const std::string& key, double fallback, int dim) {
    seen_.insert(key);
    if (!params_.contains(key)) return Vec::Constant(dim, fallback);
    const json& v = params_[key];
    if (v.is_number()) return Vec::Constant(dim, v.get<double>());
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
      throw ConfigError("source '" + source_ + "': param '" + key + "' must be a number or an array of length " +
                        std::to_string(dim));
    Vec out(dim);
    for (int i = 0; i < dim; ++i) {
      if (!v[i].is_number()) throw ConfigError("source '" + source_ + "': param '" + key + "' has a non-numeric entry");
      out(i) = v[i].get<double>();
    }
    return out;
  }

  int array_length(const std::string& key) const {
    return params_.contains(key) && params_[key].is_array() ? static_cast<int>(params_[key].size()) : 0;
  }

  void require(bool ok, const std::string& what) const {
    if (!ok) throw ConfigError("source '" + source_ + "': " + what);
  }

  json finish() const {
    for (const auto& [k, v] : params_.items())
      if (!seen_.count(k)) throw ConfigError("source '" + source_ + "': unknown param '" + k + "'");
    return params_;
  }

 private:
  std::string source_;
  json params_;
  std::set<std::string> seen_;
};

SourceModel uniform_box(const json& params) {
  ParamReader r("uniform-box", params);
  const int dim = r.integer("dim", std::max({1, r.array_length("lo"), r.array_length("hi")}));
  r.require(dim >= 1, "dim must be >= 1");
  Box box{r.vector("lo", 0.0, dim), r.vector("hi", 1.0, dim)};
  r.require((box.lo.array() < box.hi.array()).all(), "invalid bounds (lo >= hi)");
  json p = r.finish();
  p["dim"] = dim;
  const double density = 1.0 / box.volume();
  return SourceModel::analytic(
      "uniform-box", p, box, [box, density](const Vec& g) { return box.contains(g) ? density : 0.0; },
      [box](Rng& rng, Eigen::Ref<Vec> out) {
        for (int i = 0; i < box.dim(); ++i) out(i) = rng.uniform(box.lo(i), box.hi(i));
      });
}

/// i.i.d. exponential components of the given mean, truncated to [lo, hi]
/// per axis and renormalised there.
SourceModel truncated_exponential(const std::string& id, json params, int dim, double mean, double lo, double hi) {
  const double a = std::exp(-lo / mean);
  const double b = std::exp(-hi / mean);
  const double z = mean * (a - b);
  Box box = Box::cube(dim, lo, hi);
  return SourceModel::analytic(
      id, std::move(params), box,
      [box, mean, z](const Vec& g) {
        if (!box.contains(g)) return 0.0;
        double v = 1.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) v *= std::exp(-g(i) / mean) / z;
        return v;
      },
      [dim, mean, a, b](Rng& rng, Eigen::Ref<Vec> out) {
        for (int i = 0; i < dim; ++i) out(i) = -mean * std::log(a - rng.uniform() * (a - b));
      });
}

SourceModel trunc_exp(const json& params) {
  ParamReader r("trunc-exp", params);
  const int dim = r.integer("dim", 1);
  const double lo = r.number("lo", 0.1);
  const double hi = r.number("hi", 10.0);
  const double mean = r.number("mean", 1.0);
  r.require(dim >= 1, "dim must be >= 1");
  r.require(lo < hi, "invalid bounds (lo >= hi)");
  r.require(lo >= 0, "lo must be >= 0");
  r.require(mean > 0, "nonpositive mean");
  json p = r.finish();
  p.update({{"dim", dim}, {"lo", lo}, {"hi", hi}, {"mean", mean}});
  return truncated_exponential("trunc-exp", p, dim, mean, lo, hi);
}

SourceModel exp_iid(const json& params) {
  ParamReader r("exp-iid", params);
  const int dim = r.integer("dim", 2);
  const double mean = r.number("mean", 1.0);
  r.require(dim >= 1, "dim must be >= 1");
  r.require(mean > 0, "nonpositive mean");
  json p = r.finish();
  p.update({{"dim", dim}, {"mean", mean}});
  return truncated_exponential("exp-iid", p, dim, mean, 0.0, -mean * std::log(kTailMass));
}

SourceModel rayleigh_gain(const json& params) {
  ParamReader r("rayleigh-gain", params);
  const int dim = r.integer("dim", 1);
  const double mean = r.number("mean", 1.0);
  const std::string law = r.text("law", "amplitude");
  r.require(dim >= 1, "dim must be >= 1");
  r.require(mean > 0, "nonpositive mean");
  r.require(law == "amplitude" || law == "power", "law must be 'amplitude' or 'power'");
  json p = r.finish();
  p.update({{"dim", dim}, {"mean", mean}, {"law", law}});
  if (law == "power") return truncated_exponential("rayleigh-gain", p, dim, mean, 0.0, -mean * std::log(kTailMass));

  // Rayleigh amplitude with E(g) = mean: sigma = mean * sqrt(2 / pi).
  const double sigma = mean * std::sqrt(2.0 / std::numbers::pi);
  const double hi = sigma * std::sqrt(-2.0 * std::log(kTailMass));
  const double mass = 1.0 - kTailMass;
  Box box = Box::cube(dim, 0.0, hi);
  return SourceModel::analytic(
      "rayleigh-gain", p, box,
      [box, sigma, mass](const Vec& g) {
        if (!box.contains(g)) return 0.0;
        double v = 1.0;
        for (Eigen::Index i = 0; i < g.size(); ++i)
          v *= g(i) / (sigma * sigma) * std::exp(-g(i) * g(i) / (2 * sigma * sigma)) / mass;
        return v;
      },
      [dim, sigma, mass](Rng& rng, Eigen::Ref<Vec> out) {
        for (int i = 0; i < dim; ++i) out(i) = sigma * std::sqrt(-2.0 * std::log1p(-rng.uniform() * mass));
      });
}

/// Truncated N(0, sd^2) on [-3 sd, 3 sd] by rejection.
double truncated_noise(Rng& rng, double sd) {
  for (;;) {
    const double z = rng.normal();
    if (std::abs(z) <= 3.0) return sd * z;
  }
}

SourceModel synthetic_load(const json& params) {
  ParamReader r("synthetic-load", params);
  const int dim = r.integer("dim", 24);
  const int count = r.integer("count", 300);
  const double seed = r.number("seed", 2024);
  const double noise = r.number("noise", 0.05);
  r.require(dim >= 2, "dim must be >= 2");
  r.require(count >= 1, "count must be >= 1");
  r.require(noise >= 0, "noise must be >= 0");
  json p = r.finish();
  p.update({{"dim", dim}, {"count", count}, {"seed", seed}, {"noise", noise}});

  Rng rng(derive_seed(static_cast<std::uint64_t>(seed), "synthetic-load"));
  const double two_pi = 2.0 * std::numbers::pi;
  Mat data(dim, count);
  for (int n = 0; n < count; ++n) {
    // kWh per slot: smooth daily base, 1-3 usage peaks, measurement noise.
    const double level = rng.uniform(0.3, 0.8);
    const double swing = level * rng.uniform(0.2, 0.5);
    const double phase = rng.uniform(0.0, dim);
    const int peaks = 1 + static_cast<int>(rng.index(3));
    std::vector<double> at(peaks), height(peaks), width(peaks);
    for (int k = 0; k < peaks; ++k) {
      at[k] = rng.uniform(0.0, dim);
      height[k] = rng.uniform(1.0, 3.0);
      width[k] = rng.uniform(0.5, 1.5);
    }
    for (int t = 0; t < dim; ++t) {
      double v = level + swing * std::sin(two_pi * (t - phase) / dim);
      for (int k = 0; k < peaks; ++k) {
        double dt = std::abs(t - at[k]);
        dt = std::min(dt, dim - dt);
        v += height[k] * std::exp(-0.5 * dt * dt / (width[k] * width[k]));
      }
      v += truncated_noise(rng, noise);
      data(t, n) = std::max(0.0, v);
    }
  }
  return SourceModel::empirical("synthetic-load", std::move(data), p);
}

}  // namespace

SourceModel SourceModel::analytic(std::string id, nlohmann::json params, Box support, PdfFn pdf, DrawFn draw) {
  SourceModel s;
  s.kind_ = Kind::analytic;
  s.id_ = std::move(id);
  s.params_ = std::move(params);
  s.support_ = std::move(support);
  s.pdf_ = std::move(pdf);
  s.draw_ = std::move(draw);
  return s;
}

SourceModel SourceModel::empirical(std::string id, Mat data, nlohmann::json params) {
  if (data.cols() == 0 || data.rows() == 0) throw ConfigError("empirical source '" + id + "': empty dataset");
  Box box{data.rowwise().minCoeff(), data.rowwise().maxCoeff()};
  return empirical(std::move(id), std::move(data), std::move(box), std::move(params));
}

SourceModel SourceModel::empirical(std::string id, Mat data, Box support, nlohmann::json params) {
  if (data.cols() == 0 || data.rows() == 0) throw ConfigError("empirical source '" + id + "': empty dataset");
  if (support.dim() != data.rows()) throw ConfigError("empirical source '" + id + "': support dimension mismatch");
  for (Eigen::Index k = 0; k < data.cols(); ++k) {
    if (!support.contains(data.col(k), 1e-12))
      throw ConfigError("empirical source '" + id + "': point " + std::to_string(k) + " outside support");
  }
  SourceModel s;
  s.kind_ = Kind::empirical;
  s.id_ = std::move(id);
  s.params_ = std::move(params);
  s.support_ = std::move(support);
  s.data_ = std::move(data);
  return s;
}

double SourceModel::pdf(const Vec& g) const {
  if (kind_ != Kind::analytic) throw ConfigError("source '" + id_ + "': pdf is only defined for analytic sources");
  return pdf_(g);
}

Mat SourceModel::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw ConfigError("sample: n must be >= 1");
  Rng rng(seed);
  Mat out(param_dim(), static_cast<Eigen::Index>(n));
  if (kind_ == Kind::empirical) {
    if (data_.cols() == 0) throw ConfigError("sample: empirical source has an empty dataset");
    for (std::size_t k = 0; k < n; ++k) out.col(k) = data_.col(static_cast<Eigen::Index>(rng.index(data_.cols())));
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::Ref<Vec> col = out.col(static_cast<Eigen::Index>(k));
    draw_(rng, col);
  }
  return out;
}

const Mat& SourceModel::data() const {
  if (kind_ != Kind::empirical) throw ConfigError("source '" + id_ + "' has no dataset");
  return data_;
}

nlohmann::json SourceModel::to_json() const { return {{"id", id_}, {"params", params_}}; }

std::vector<std::string> builtin_source_ids() {
  return {"uniform-box", "trunc-exp", "exp-iid", "rayleigh-gain", "synthetic-load"};
}

SourceModel builtin_source(const std::string& name, const nlohmann::json& params) {
  const json p = params.is_null() ? json::object() : params;
  if (name == "uniform-box") return uniform_box(p);
  if (name == "trunc-exp") return trunc_exp(p);
  if (name == "exp-iid") return exp_iid(p);
  if (name == "rayleigh-gain") return rayleigh_gain(p);
  if (name == "synthetic-load") return synthetic_load(p);
  throw ConfigError("unknown source id '" + name + "'");
}

double pdf_mass(const SourceModel& source) {
  auto f = [&](const Vec& g) { return source.pdf(g); };
  if (source.param_dim() <= 2) return integrate_box(f, source.support());
  return integrate_box_mc(f, source.support(), 200000, 99);
}

}  // namespace goq

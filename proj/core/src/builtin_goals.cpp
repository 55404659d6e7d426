#include "goq/goal_model.hpp"
#include "goq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace goq {

namespace {

using nlohmann::json;

/// Reads goal parameters with defaults and rejects unknown keys.
class ParamReader {
 public:
  ParamReader(std::string goal, const json& params) : goal_(std::move(goal)), params_(params) {
    if (!params_.is_object()) throw ConfigError("goal '" + goal_ + "': params must be a JSON object");
  }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!params_.contains(key)) return fallback;
    if (!params_[key].is_number()) throw ConfigError("goal '" + goal_ + "': param '" + key + "' must be a number");
    return params_[key].get<double>();
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    if (v != std::floor(v)) throw ConfigError("goal '" + goal_ + "': param '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  json finish() {
    for (const auto& [k, v] : params_.items()) {
      if (!seen_.count(k)) throw ConfigError("goal '" + goal_ + "': unknown param '" + k + "'");
    }
    return params_;
  }

  void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("goal '" + goal_ + "': invalid parameter, " + what);
  }

 private:
  std::string goal_;
  json params_;
  std::set<std::string> seen_;
};

Mat m11(double v) { return Mat::Constant(1, 1, v); }

GoalModel scalar_quadratic(const json& params) {
  ParamReader r("scalar-quadratic", params);
  GoalModel::Spec s;
  s.id = "scalar-quadratic";
  s.params = r.finish();
  s.evaluate = [](const Vec& x, const Vec& g) { return (x(0) - g(0)) * (x(0) - g(0)); };
  s.decide = [](const Vec& g) { return Vec(g); };
  s.decision_set = DecisionSet::unbounded(1);
  s.oracles.grad_x = [](const Vec& x, const Vec& g) { return scalar_vec(2 * (x(0) - g(0))); };
  s.oracles.hess_x = [](const Vec&, const Vec&) { return m11(2.0); };
  s.oracles.jac_chi = [](const Vec&) { return m11(1.0); };
  s.oracles.hess_chi = [](const Vec&) { return std::vector<Mat>{m11(0.0)}; };
  return GoalModel(std::move(s));
}

GoalModel squared_error(const json& params) {
  ParamReader r("squared-error", params);
  const int dim = r.integer("dim", 1);
  r.require(dim >= 1, "dim >= 1");
  GoalModel::Spec s;
  s.id = "squared-error";
  s.params = r.finish();
  s.params["dim"] = dim;
  s.decision_dim = s.param_dim = dim;
  s.evaluate = [](const Vec& x, const Vec& g) { return (x - g).squaredNorm(); };
  s.decide = [](const Vec& g) { return Vec(g); };
  s.decision_set = DecisionSet::unbounded(dim);
  s.oracles.grad_x = [](const Vec& x, const Vec& g) { return Vec(2 * (x - g)); };
  s.oracles.hess_x = [dim](const Vec&, const Vec&) { return Mat(2.0 * Mat::Identity(dim, dim)); };
  s.oracles.jac_chi = [dim](const Vec&) { return Mat(Mat::Identity(dim, dim)); };
  s.oracles.hess_chi = [dim](const Vec&) { return std::vector<Mat>(dim, Mat::Zero(dim, dim)); };
  return GoalModel(std::move(s));
}

// f = x - log(1 + a g x), the negated log(1 + a g x) - x.
GoalModel scalar_log(const json& params) {
  ParamReader r("scalar-log", params);
  const double a = r.number("gain", 10.0);
  r.require(a > 0, "gain > 0");
  GoalModel::Spec s;
  s.id = "scalar-log";
  s.params = r.finish();
  s.params["gain"] = a;
  s.negated = true;
  s.evaluate = [a](const Vec& x, const Vec& g) { return x(0) - std::log1p(a * g(0) * x(0)); };
  s.decide = [a](const Vec& g) { return scalar_vec(std::max(0.0, 1.0 - 1.0 / (a * g(0)))); };
  s.decision_set = DecisionSet::nonnegative(1);
  s.kink_distance = [a](const Vec& g) { return std::abs(1.0 - 1.0 / (a * g(0))); };
  s.oracles.grad_x = [a](const Vec& x, const Vec& g) { return scalar_vec(1.0 - a * g(0) / (1.0 + a * g(0) * x(0))); };
  s.oracles.hess_x = [a](const Vec& x, const Vec& g) {
    const double t = a * g(0) / (1.0 + a * g(0) * x(0));
    return m11(t * t);
  };
  s.oracles.jac_chi = [a](const Vec& g) { return m11(a * g(0) > 1.0 ? 1.0 / (a * g(0) * g(0)) : 0.0); };
  s.oracles.hess_chi = [a](const Vec& g) {
    return std::vector<Mat>{m11(a * g(0) > 1.0 ? -2.0 / (a * g(0) * g(0) * g(0)) : 0.0)};
  };
  return GoalModel(std::move(s));
}

// f = -exp(-c/(x g)) / x^eta, chi = c / (eta g).
GoalModel scalar_ee(const json& params) {
  ParamReader r("scalar-ee", params);
  const double c = r.number("c", 1.0);
  const double eta = r.number("eta", 1.0);
  r.require(c > 0, "c > 0");
  r.require(eta >= 1, "eta >= 1");
  GoalModel::Spec s;
  s.id = "scalar-ee";
  s.params = r.finish();
  s.params["c"] = c;
  s.params["eta"] = eta;
  s.negated = true;
  s.evaluate = [c, eta](const Vec& x, const Vec& g) {
    if (x(0) <= 0) return 0.0;
    return -std::exp(-c / (x(0) * g(0))) / std::pow(x(0), eta);
  };
  s.decide = [c, eta](const Vec& g) { return scalar_vec(c / (eta * g(0))); };
  s.decision_set = DecisionSet::nonnegative(1);
  s.oracles.grad_x = [c, eta](const Vec& x, const Vec& g) {
    const double u = c / (x(0) * g(0));
    return scalar_vec(-std::exp(-u) * std::pow(x(0), -eta - 1) * (u - eta));
  };
  s.oracles.hess_x = [c, eta](const Vec& x, const Vec& g) {
    const double u = c / (x(0) * g(0));
    return m11(-std::exp(-u) * std::pow(x(0), -eta - 2) * (u * u - (2 * eta + 2) * u + eta * (eta + 1)));
  };
  s.oracles.jac_chi = [c, eta](const Vec& g) { return m11(-c / (eta * g(0) * g(0))); };
  s.oracles.hess_chi = [c, eta](const Vec& g) { return std::vector<Mat>{m11(2 * c / (eta * g(0) * g(0) * g(0)))}; };
  return GoalModel(std::move(s));
}

// f = -(1 - exp(-g x))^N / x, chi = k / g with k the maximiser of (1-e^-y)^N / y.
GoalModel scalar_sigmoid(const json& params) {
  ParamReader r("scalar-sigmoid10", params);
  const int n = r.integer("exponent", 10);
  r.require(n >= 2, "exponent >= 2");
  // Stationarity of (1 - e^-y)^N / y: N y e^-y = 1 - e^-y.
  const double k = bisect([n](double y) { return n * y * std::exp(-y) - (1.0 - std::exp(-y)); }, 1e-3 + std::log(1.0 * n) * 0.5, 4.0 * n, 1e-15);
  GoalModel::Spec s;
  s.id = "scalar-sigmoid10";
  s.params = r.finish();
  s.params["exponent"] = n;
  s.negated = true;
  s.evaluate = [n](const Vec& x, const Vec& g) {
    if (x(0) <= 0) return 0.0;
    return -std::pow(-std::expm1(-g(0) * x(0)), n) / x(0);
  };
  s.decide = [k](const Vec& g) { return scalar_vec(k / g(0)); };
  s.decision_set = DecisionSet::nonnegative(1);
  s.oracles.grad_x = [n](const Vec& x, const Vec& g) {
    const double e = std::exp(-g(0) * x(0));
    const double sv = 1.0 - e;
    const double ds = g(0) * e;
    const double xx = x(0);
    return scalar_vec(-(n * std::pow(sv, n - 1) * ds / xx - std::pow(sv, n) / (xx * xx)));
  };
  s.oracles.hess_x = [n](const Vec& x, const Vec& g) {
    const double e = std::exp(-g(0) * x(0));
    const double sv = 1.0 - e;
    const double ds = g(0) * e;
    const double dds = -g(0) * g(0) * e;
    const double xx = x(0);
    const double f2 = n * (n - 1) * std::pow(sv, n - 2) * ds * ds / xx + n * std::pow(sv, n - 1) * dds / xx -
                      2.0 * n * std::pow(sv, n - 1) * ds / (xx * xx) + 2.0 * std::pow(sv, n) / (xx * xx * xx);
    return m11(-f2);
  };
  s.oracles.jac_chi = [k](const Vec& g) { return m11(-k / (g(0) * g(0))); };
  s.oracles.hess_chi = [k](const Vec& g) { return std::vector<Mat>{m11(2 * k / (g(0) * g(0) * g(0)))}; };
  return GoalModel(std::move(s));
}

// f = -sum_i exp(-c / (x_i g_i / sigma2)) / sum_i x_i over {x >= 0, sum x <= P}.
GoalModel ee_multiband(const json& params) {
  ParamReader r("ee-multiband", params);
  const int bands = r.integer("S", 2);
  const double c = r.number("c", 1.0);
  const double pmax = r.number("P_max", 5.0);
  const double sigma2 = r.number("sigma2", 1.0);
  r.require(bands >= 1, "S >= 1");
  r.require(c > 0, "c > 0");
  r.require(pmax > 0, "P_max > 0");
  r.require(sigma2 > 0, "sigma2 > 0");
  GoalModel::Spec s;
  s.id = "ee-multiband";
  s.params = r.finish();
  s.params.update({{"S", bands}, {"c", c}, {"P_max", pmax}, {"sigma2", sigma2}});
  s.decision_dim = s.param_dim = bands;
  s.negated = true;
  s.decision_set = DecisionSet::budget(bands, pmax);

  auto term = [c, sigma2](double x, double g) { return x > 0 ? std::exp(-c * sigma2 / (x * g)) : 0.0; };
  s.evaluate = [term](const Vec& x, const Vec& g) {
    double num = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) num += term(x(i), g(i));
    const double den = x.sum();
    return den > 0 ? -num / den : 0.0;
  };
  auto strongest = [](const Vec& g) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < g.size(); ++i)
      if (g(i) > g(best)) best = i;
    return best;
  };
  // All power on the strongest band: by the mediant inequality the ratio
  // never beats the best single-band ratio, and that one peaks at c/gamma.
  s.decide = [=](const Vec& g) {
    Vec x = Vec::Zero(g.size());
    const Eigen::Index i = strongest(g);
    x(i) = std::min(c * sigma2 / g(i), pmax);
    return x;
  };
  s.kink_distance = [=](const Vec& g) {
    const Eigen::Index i = strongest(g);
    double d = std::abs(c * sigma2 / g(i) - pmax) / pmax;
    for (Eigen::Index j = 0; j < g.size(); ++j)
      if (j != i) d = std::min(d, (g(i) - g(j)) / g(i));
    return d;
  };
  // n_i = d num / d x_i and n_ii = d^2 num / d x_i^2.
  auto parts = [c, sigma2](const Vec& x, const Vec& g, Vec& e, Vec& n1, Vec& n2) {
    e = n1 = n2 = Vec::Zero(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x(i) <= 0) continue;
      const double u = c * sigma2 / (x(i) * g(i));
      e(i) = std::exp(-u);
      n1(i) = e(i) * u / x(i);
      n2(i) = e(i) * (u * u - 2 * u) / (x(i) * x(i));
    }
  };
  s.oracles.grad_x = [parts](const Vec& x, const Vec& g) {
    Vec e, n1, n2;
    parts(x, g, e, n1, n2);
    const double d = x.sum();
    const double num = e.sum();
    return Vec(-(n1.array() / d - num / (d * d)).matrix());
  };
  s.oracles.hess_x = [parts](const Vec& x, const Vec& g) {
    Vec e, n1, n2;
    parts(x, g, e, n1, n2);
    const double d = x.sum();
    const double num = e.sum();
    const Eigen::Index k = x.size();
    Mat h(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        h(i, j) = -((i == j ? n2(i) / d : 0.0) - n1(i) / (d * d) - n1(j) / (d * d) + 2 * num / (d * d * d));
    return h;
  };
  s.oracles.jac_chi = [=](const Vec& g) {
    Mat j = Mat::Zero(g.size(), g.size());
    const Eigen::Index i = strongest(g);
    if (c * sigma2 / g(i) < pmax) j(i, i) = -c * sigma2 / (g(i) * g(i));
    return j;
  };
  s.oracles.hess_chi = [=](const Vec& g) {
    std::vector<Mat> out(static_cast<std::size_t>(g.size()), Mat::Zero(g.size(), g.size()));
    const Eigen::Index i = strongest(g);
    if (c * sigma2 / g(i) < pmax) out[i](i, i) = 2 * c * sigma2 / (g(i) * g(i) * g(i));
    return out;
  };
  return GoalModel(std::move(s));
}

/// Active set and level of x_i = [level - floor_i]^+ with sum x = total.
/// Exact breakpoint search over the sorted floors.
struct Filling {
  double level = 0.0;
  std::vector<char> active;
  int count = 0;
};

Filling fill(const Vec& floors, double total) {
  const Eigen::Index n = floors.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return floors(a) < floors(b); });
  Filling out;
  out.active.assign(static_cast<std::size_t>(n), 0);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    acc += floors(order[k]);
    const double level = (total + acc) / static_cast<double>(k + 1);
    if (k + 1 == n || level <= floors(order[k + 1])) {
      out.level = level;
      out.count = static_cast<int>(k + 1);
      for (Eigen::Index j = 0; j <= k; ++j) out.active[order[j]] = 1;
      return out;
    }
  }
  return out;
}

double fill_kink(const Vec& floors, const Filling& f) {
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < floors.size(); ++i) d = std::min(d, std::abs(f.level - floors(i)));
  return d / std::max(1.0, std::abs(f.level));
}

// f = -sum_i log(1 + x_i g_i / sigma2) over {x >= 0, sum x <= P}; water filling.
GoalModel se_multiband(const json& params) {
  ParamReader r("se-multiband", params);
  const int bands = r.integer("S", 2);
  const double pmax = r.number("P_max", 5.0);
  const double sigma2 = r.number("sigma2", 1.0);
  r.require(bands >= 1, "S >= 1");
  r.require(pmax > 0, "P_max > 0");
  r.require(sigma2 > 0, "sigma2 > 0");
  GoalModel::Spec s;
  s.id = "se-multiband";
  s.params = r.finish();
  s.params.update({{"S", bands}, {"P_max", pmax}, {"sigma2", sigma2}});
  s.decision_dim = s.param_dim = bands;
  s.negated = true;
  s.decision_set = DecisionSet::budget(bands, pmax);
  auto floors = [sigma2](const Vec& g) {
    Vec a(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) a(i) = g(i) > 0 ? sigma2 / g(i) : std::numeric_limits<double>::max();
    return a;
  };
  s.evaluate = [sigma2](const Vec& x, const Vec& g) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) v -= std::log1p(x(i) * g(i) / sigma2);
    return v;
  };
  s.decide = [=](const Vec& g) {
    const Vec a = floors(g);
    const Filling f = fill(a, pmax);
    Vec x = Vec::Zero(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (f.active[i]) x(i) = std::max(0.0, f.level - a(i));
    return x;
  };
  s.kink_distance = [=](const Vec& g) {
    const Vec a = floors(g);
    return fill_kink(a, fill(a, pmax));
  };
  s.oracles.grad_x = [sigma2](const Vec& x, const Vec& g) {
    Vec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = -g(i) / (sigma2 + x(i) * g(i));
    return out;
  };
  s.oracles.hess_x = [sigma2](const Vec& x, const Vec& g) {
    Mat h = Mat::Zero(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double t = g(i) / (sigma2 + x(i) * g(i));
      h(i, i) = t * t;
    }
    return h;
  };
  s.oracles.jac_chi = [=](const Vec& g) {
    const Vec a = floors(g);
    const Filling f = fill(a, pmax);
    const Eigen::Index n = g.size();
    Mat j = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!f.active[i]) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!f.active[k]) continue;
        const double da = -sigma2 / (g(k) * g(k));
        j(i, k) = da / f.count - (i == k ? da : 0.0);
      }
    }
    return j;
  };
  s.oracles.hess_chi = [=](const Vec& g) {
    const Vec a = floors(g);
    const Filling f = fill(a, pmax);
    const Eigen::Index n = g.size();
    std::vector<Mat> out(static_cast<std::size_t>(n), Mat::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!f.active[i]) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!f.active[k]) continue;
        const double dda = 2 * sigma2 / (g(k) * g(k) * g(k));
        out[i](k, k) = dda / f.count - (i == k ? dda : 0.0);
      }
    }
    return out;
  };
  return GoalModel(std::move(s));
}

// f = (x1 - h1)^2 + (x2 - h2)^2 + (x1 - x2)^2 with h1 = 2u - u^2/2,
// h2 = u^2 - u, u = g1 g2; chi = (u, u^2 / 2).
GoalModel quadratic_2d(const json& params) {
  ParamReader r("quadratic-2d", params);
  GoalModel::Spec s;
  s.id = "quadratic-2d";
  s.params = r.finish();
  s.decision_dim = s.param_dim = 2;
  s.decision_set = DecisionSet::unbounded(2);
  auto h = [](const Vec& g) {
    const double u = g(0) * g(1);
    return std::pair{2 * u - 0.5 * u * u, u * u - u};
  };
  s.evaluate = [h](const Vec& x, const Vec& g) {
    const auto [h1, h2] = h(g);
    const double a = x(0) - h1;
    const double b = x(1) - h2;
    const double c = x(0) - x(1);
    return a * a + b * b + c * c;
  };
  s.decide = [](const Vec& g) {
    const double u = g(0) * g(1);
    Vec x(2);
    x << u, 0.5 * u * u;
    return x;
  };
  s.oracles.grad_x = [h](const Vec& x, const Vec& g) {
    const auto [h1, h2] = h(g);
    Vec out(2);
    out << 2 * (x(0) - h1) + 2 * (x(0) - x(1)), 2 * (x(1) - h2) - 2 * (x(0) - x(1));
    return out;
  };
  s.oracles.hess_x = [](const Vec&, const Vec&) {
    Mat m(2, 2);
    m << 4, -2, -2, 4;
    return m;
  };
  s.oracles.jac_chi = [](const Vec& g) {
    const double u = g(0) * g(1);
    Mat j(2, 2);
    j << g(1), g(0), u * g(1), u * g(0);
    return j;
  };
  s.oracles.hess_chi = [](const Vec& g) {
    const double u = g(0) * g(1);
    Mat h1(2, 2);
    h1 << 0, 1, 1, 0;
    Mat h2(2, 2);
    h2 << g(1) * g(1), 2 * u, 2 * u, g(0) * g(0);
    return std::vector<Mat>{h1, h2};
  };
  return GoalModel(std::move(s));
}

// f = ||x + g||_P over {x >= 0, sum x >= E}; chi is valley filling.
GoalModel pcs_lp(const json& params) {
  ParamReader r("pcs-lp", params);
  const int dim = r.integer("dim", 24);
  const double pe = r.number("P", 2.0);
  const double demand = r.number("E", 30.0);
  r.require(dim >= 1, "dim >= 1");
  r.require(pe >= 1, "P >= 1");
  r.require(demand > 0, "E > 0");
  GoalModel::Spec s;
  s.id = "pcs-lp";
  s.params = r.finish();
  s.params.update({{"dim", dim}, {"P", pe}, {"E", demand}});
  s.decision_dim = s.param_dim = dim;
  s.decision_set = DecisionSet::covering(dim, demand);
  // Scaled by the largest entry so large exponents do not overflow.
  const bool integral = pe == std::floor(pe) && pe <= 64;
  auto norm = [pe, integral](const Vec& y) {
    const double m = y.cwiseAbs().maxCoeff();
    if (m == 0) return 0.0;
    double s = 0.0;
    if (integral) {
      const auto k = static_cast<unsigned>(pe);
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        double b = std::abs(y(i)) / m, acc = 1.0;
        for (unsigned e = k; e; e >>= 1, b *= b)
          if (e & 1u) acc *= b;
        s += acc;
      }
    } else {
      s = (y.array().abs() / m).pow(pe).sum();
    }
    return m * std::pow(s, 1.0 / pe);
  };
  s.evaluate = [norm](const Vec& x, const Vec& g) { return norm(x + g); };
  s.decide = [demand](const Vec& g) {
    const Filling f = fill(g, demand);
    Vec x = Vec::Zero(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (f.active[i]) x(i) = std::max(0.0, f.level - g(i));
    return x;
  };
  s.kink_distance = [demand](const Vec& g) { return fill_kink(g, fill(g, demand)); };
  s.oracles.grad_x = [norm, pe](const Vec& x, const Vec& g) {
    const Vec y = x + g;
    const double n = norm(y);
    return Vec((y.array() / n).pow(pe - 1).matrix());
  };
  s.oracles.hess_x = [norm, pe](const Vec& x, const Vec& g) {
    const Vec y = x + g;
    const double n = norm(y);
    const Vec w = (y.array() / n).pow(pe - 1).matrix();
    Mat h = -(pe - 1) / n * w * w.transpose();
    for (Eigen::Index i = 0; i < y.size(); ++i) h(i, i) += (pe - 1) / n * std::pow(y(i) / n, pe - 2);
    return h;
  };
  s.oracles.jac_chi = [demand](const Vec& g) {
    const Filling f = fill(g, demand);
    const Eigen::Index n = g.size();
    Mat j = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k)
        if (f.active[i] && f.active[k]) j(i, k) = 1.0 / f.count - (i == k ? 1.0 : 0.0);
    return j;
  };
  s.oracles.hess_chi = [dim](const Vec&) { return std::vector<Mat>(dim, Mat::Zero(dim, dim)); };
  return GoalModel(std::move(s));
}

}  // namespace

std::vector<std::string> builtin_goal_ids() {
  return {"scalar-ee",    "scalar-log",   "scalar-sigmoid10", "scalar-quadratic", "ee-multiband",
          "se-multiband", "quadratic-2d", "pcs-lp",           "squared-error"};
}

GoalModel builtin_goal(const std::string& name, const nlohmann::json& params) {
  const json p = params.is_null() ? json::object() : params;
  if (name == "scalar-quadratic") return scalar_quadratic(p);
  if (name == "scalar-log") return scalar_log(p);
  if (name == "scalar-ee") return scalar_ee(p);
  if (name == "scalar-sigmoid10") return scalar_sigmoid(p);
  if (name == "ee-multiband") return ee_multiband(p);
  if (name == "se-multiband") return se_multiband(p);
  if (name == "quadratic-2d") return quadratic_2d(p);
  if (name == "pcs-lp") return pcs_lp(p);
  if (name == "squared-error") return squared_error(p);
  throw ConfigError("unknown goal id '" + name + "'");
}

}  // namespace goq

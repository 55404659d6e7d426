#include "goq/hr_scalar.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace goq {

// ---------------------------------------------------------------------------
// DensityProfile

DensityProfile DensityProfile::from_shape(double lo, double hi, ScalarFn shape, int panels) {
  if (!(lo < hi)) throw ConfigError("density: degenerate support");
  if (panels < 1) throw ConfigError("density: panels must be >= 1");
  DensityProfile d;
  d.lo_ = lo;
  d.hi_ = hi;
  d.shape_ = std::move(shape);
  d.cum_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
  QuadratureOptions qo;
  qo.panels = 1;
  const double w = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = lo + k * w;
    const double b = (k + 1 == panels) ? hi : lo + (k + 1) * w;
    const double v = integrate(d.shape_, a, b, qo);
    if (v < -1e-12) throw NumericError("density: negative shape");
    d.cum_[k + 1] = d.cum_[k] + std::max(0.0, v);
  }
  const double total = d.cum_.back();
  if (!(total > 0) || !std::isfinite(total)) throw NumericError("density: shape has no mass");
  for (double& c : d.cum_) c /= total;
  d.cum_.back() = 1.0;
  d.norm_ = 1.0 / total;
  return d;
}

DensityProfile DensityProfile::uniform(double lo, double hi) {
  return from_shape(lo, hi, [](double) { return 1.0; }, 1);
}

double DensityProfile::operator()(double g) const {
  if (g < lo_ || g > hi_) return 0.0;
  return norm_ * shape_(g);
}

double DensityProfile::cdf(double g) const {
  if (g <= lo_) return 0.0;
  if (g >= hi_) return 1.0;
  const int panels = static_cast<int>(cum_.size()) - 1;
  const double w = (hi_ - lo_) / panels;
  const int k = std::min(panels - 1, static_cast<int>((g - lo_) / w));
  const double a = lo_ + k * w;
  using GL = boost::math::quadrature::gauss<double, 20>;
  const double part = GL::integrate(shape_, a, g);
  return std::clamp(cum_[k] + norm_ * part, cum_[k], cum_[k + 1]);
}

double DensityProfile::quantile(double u) const {
  if (u <= 0) return lo_;
  if (u >= 1) return hi_;
  const int panels = static_cast<int>(cum_.size()) - 1;
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const int k = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, panels - 1);
  const double w = (hi_ - lo_) / panels;
  double a = lo_ + k * w;
  double b = (k + 1 == panels) ? hi_ : lo_ + (k + 1) * w;
  while (b - a > 1e-10 * std::max(1.0, std::abs(a))) {
    const double m = 0.5 * (a + b);
    if (cdf(m) < u)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double hr_prefactor(int M, int kappa) { return 1.0 / (std::pow(2.0 * M, kappa) * factorial(kappa + 1)); }

void require_scalar(const GoalModel& goal, const SourceModel& source) {
  if (goal.decision_dim() != 1 || goal.param_dim() != 1 || source.param_dim() != 1)
    throw ConfigError("scalar HR analysis requires d = p = 1");
  if (source.is_empirical()) throw ConfigError("scalar HR analysis requires an analytic source");
}

double chi_prime(const GoalModel& goal, const Vec& g) {
  if (goal.oracles().jac_chi) return goal.oracles().jac_chi(g)(0, 0);
  return curvature(goal, g, DerivativeSource::numeric).jac_chi(0, 0);
}

QuadratureOptions table_quadrature() {
  QuadratureOptions qo;
  qo.abs_tol = 1e-9;
  qo.rel_tol = 1e-8;
  qo.panels = 32;
  return qo;
}

}  // namespace

ScalarFn value_density(const GoalModel& goal, const SourceModel& source, int kappa) {
  require_scalar(goal, source);
  if (kappa < 1 || kappa > 4) throw ConfigError("value_density: kappa must be in 1..4");
  return [goal, source, kappa](double t) {
    const Vec g = scalar_vec(t);
    const double phi = source.pdf(g);
    if (phi == 0.0) return 0.0;
    return std::pow(chi_prime(goal, g), kappa) * scalar_x_derivative(goal, g, kappa) * phi;
  };
}

DensityProfile optimal_density(const GoalModel& goal, const SourceModel& source, int kappa) {
  const ScalarFn p = value_density(goal, source, kappa);
  const double lo = source.support().lo(0);
  const double hi = source.support().hi(0);
  constexpr int kProbe = 2001;
  double peak = 0.0;
  std::vector<double> v(kProbe);
  for (int k = 0; k < kProbe; ++k) {
    v[k] = p(lo + (hi - lo) * k / (kProbe - 1));
    if (!std::isfinite(v[k])) throw NumericError("optimal_density: non-finite value density");
    peak = std::max(peak, std::abs(v[k]));
  }
  if (!(peak > 0)) throw NumericError("optimal_density: value density vanishes on the support");
  const auto negative = std::count_if(v.begin(), v.end(), [&](double x) { return x < -1e-9 * peak; });
  if (negative > kProbe / 1000)
    throw NumericError("optimal_density: value density is negative on a non-negligible set (sign convention?)");
  const double e = 1.0 / (kappa + 1);
  return DensityProfile::from_shape(lo, hi, [p, e](double t) { return std::pow(std::max(0.0, p(t)), e); });
}

double hr_ol_limit(const GoalModel& goal, const SourceModel& source, const DensityProfile& rho, int M, int kappa) {
  if (M < 1) throw ConfigError("hr_ol_limit: M must be >= 1");
  const ScalarFn p = value_density(goal, source, kappa);
  bool divergent = false;
  const double integral = integrate(
      [&](double t) {
        const double pv = std::max(0.0, p(t));
        const double r = rho(t);
        if (r <= 0) {
          if (pv > 0) divergent = true;
          return 0.0;
        }
        return pv * std::pow(r, -kappa);
      },
      source.support().lo(0), source.support().hi(0), table_quadrature());
  if (divergent) throw NumericError("hr_ol_limit: density vanishes where the value density is positive");
  return hr_prefactor(M, kappa) * integral;
}

double hr_ol_limit_optimal(const GoalModel& goal, const SourceModel& source, int M, int kappa) {
  if (M < 1) throw ConfigError("hr_ol_limit: M must be >= 1");
  const ScalarFn p = value_density(goal, source, kappa);
  const double e = 1.0 / (kappa + 1);
  const double s = integrate([&](double t) { return std::pow(std::max(0.0, p(t)), e); }, source.support().lo(0),
                             source.support().hi(0), table_quadrature());
  return hr_prefactor(M, kappa) * std::pow(s, kappa + 1);
}

double normalizer_uq(const GoalModel& goal, const SourceModel& source, int kappa, int M) {
  const double lo = source.support().lo(0);
  const double hi = source.support().hi(0);
  const ScalarFn p = value_density(goal, source, kappa);
  // C_g = 1 / |G| for the uniform quantizer.
  const double integral = std::pow(hi - lo, kappa) * integrate(p, lo, hi, table_quadrature());
  if (!(integral > 0) || !std::isfinite(integral)) throw NumericError("normalizer_uq: divergent or vanishing integral");
  return 1.0 / (hr_prefactor(M, kappa) * integral);
}

ConstantDecision best_constant_decision(const GoalModel& goal, const SourceModel& source) {
  require_scalar(goal, source);
  const double lo = source.support().lo(0);
  const double hi = source.support().hi(0);
  auto phi = [&](double t) { return source.pdf(scalar_vec(t)); };
  const QuadratureOptions qo = table_quadrature();
  const double ideal = integrate([&](double t) { return goal.evaluate(goal.decide(scalar_vec(t)), scalar_vec(t)) * phi(t); }, lo, hi, qo);
  auto expected = [&](double x) {
    const Vec xv = scalar_vec(x);
    return integrate([&](double t) { return goal.evaluate(xv, scalar_vec(t)) * phi(t); }, lo, hi, qo);
  };
  // Every built-in f(.; g) is unimodal, so the minimiser of the mean lies
  // between the extreme optimal decisions.
  double a = std::numeric_limits<double>::infinity();
  double b = -a;
  for (int k = 0; k <= 200; ++k) {
    const double x = goal.decide(scalar_vec(lo + (hi - lo) * k / 200.0))(0);
    a = std::min(a, x);
    b = std::max(b, x);
  }
  const auto& set = goal.decision_set();
  a = std::max(a, set.lo(0));
  b = std::min(b, set.hi(0));
  ConstantDecision out;
  if (b - a < 1e-12) {
    out.x_bar = a;
  } else {
    out.x_bar = minimize_scalar_global(expected, a, b, 200, 1e-10).first;
  }
  out.gap = expected(out.x_bar) - ideal;
  if (!std::isfinite(out.gap)) throw NumericError("best_constant_decision: unbounded expectation");
  return out;
}

double normalizer_cd(const GoalModel& goal, const SourceModel& source, int kappa, int M) {
  const ConstantDecision cd = best_constant_decision(goal, source);
  if (!(cd.gap > 0)) throw NumericError("normalizer_cd: constant decision has no loss");
  return std::pow(2.0 * M, kappa) * factorial(kappa) * (kappa + 1) / cd.gap;
}

HrScalarReport hr_scalar_report(const GoalModel& goal, const SourceModel& source, int M, int probes) {
  HrScalarReport r;
  r.goal = goal.id();
  r.pdf = source.id();
  r.M = M;
  r.kappa = detect_kappa(goal, source, probes);
  r.ol_limit_raw = hr_ol_limit_optimal(goal, source, M, r.kappa);
  r.alpha_uq = normalizer_uq(goal, source, r.kappa, M);
  const ConstantDecision cd = best_constant_decision(goal, source);
  r.x_bar = cd.x_bar;
  r.alpha_cd = std::pow(2.0 * M, r.kappa) * factorial(r.kappa) * (r.kappa + 1) / cd.gap;
  r.ol_uq_normalized = r.alpha_uq * r.ol_limit_raw;
  r.ol_cd_normalized = r.alpha_cd * r.ol_limit_raw;
  r.reference_uq = r.reference_cd = std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::vector<HrScalarReport> table1(const Table1Config& cfg) {
  struct Row {
    const char* goal;
    const char* label;
    const char* odf;
    const char* pdf;
    double uq;
    double cd;
  };
  static const Row rows[] = {
      {"scalar-log", "log(1+10gx)-x", "[1-1/(10g)]^+", "uniform", 0.00399, 0.0488},
      {"scalar-ee", "exp(-1/(gx))/x", "1/g", "uniform", 0.648, 6.5943},
      {"scalar-sigmoid10", "(1-exp(-gx))^10/x", "3.6150/g", "uniform", 0.648, 19.4565},
      {"scalar-quadratic", "(x-g)^2", "g", "uniform", 1.0, 24.0},
      {"scalar-log", "log(1+10gx)-x", "[1-1/(10g)]^+", "exp", 0.0019, 0.4859},
      {"scalar-ee", "exp(-1/(gx))/x", "1/g", "exp", 0.083, 18.75},
      {"scalar-sigmoid10", "(1-exp(-gx))^10/x", "3.6150/g", "exp", 0.083, 61.12},
      {"scalar-quadratic", "(x-g)^2", "g", "exp", 0.24, 48.50},
  };
  constexpr int kRows = 8;
  std::vector<HrScalarReport> out(kRows);
  const nlohmann::json uniform = {{"lo", cfg.lo}, {"hi", cfg.hi}};
  const nlohmann::json texp = {{"lo", cfg.lo}, {"hi", cfg.hi}, {"mean", 1.0}};
  for_each_chunk(
      kRows, 1,
      [&](std::size_t, std::size_t begin, std::size_t) {
        const Row& row = rows[begin];
        const GoalModel goal = builtin_goal(row.goal);
        const bool is_uniform = std::string(row.pdf) == "uniform";
        const SourceModel source = builtin_source(is_uniform ? "uniform-box" : "trunc-exp", is_uniform ? uniform : texp);
        HrScalarReport r = hr_scalar_report(goal, source, cfg.M, cfg.kappa_probes);
        r.goal = row.label;
        r.pdf = row.pdf;
        r.odf = row.odf;
        r.reference_uq = row.uq;
        r.reference_cd = row.cd;
        out[begin] = r;
      },
      cfg.threads);
  return out;
}

CsvTable table1_csv(const std::vector<HrScalarReport>& rows) {
  CsvTable t({"goal", "pdf", "odf", "ol_uq", "ol_cd"});
  for (const auto& r : rows) t.add_row({r.goal, r.pdf, r.odf, fmt_sig(r.ol_uq_normalized, 6), fmt_sig(r.ol_cd_normalized, 6)});
  return t;
}

nlohmann::json table1_json(const std::vector<HrScalarReport>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"goal", r.goal},
                   {"pdf", r.pdf},
                   {"odf", r.odf},
                   {"kappa", r.kappa},
                   {"ol_uq", r.ol_uq_normalized},
                   {"ol_cd", r.ol_cd_normalized},
                   {"x_bar", r.x_bar},
                   {"reference_uq", r.reference_uq},
                   {"reference_cd", r.reference_cd}});
  }
  return out;
}

CsvTable density_csv(const DensityProfile& rho, int points) {
  if (points < 2) throw ConfigError("density_csv: need at least 2 points");
  CsvTable t({"g", "rho"});
  for (int k = 0; k < points; ++k) {
    const double g = rho.lo() + (rho.hi() - rho.lo()) * k / (points - 1);
    t.add_row({fmt_num(g), fmt_sig(rho(g), 10)});
  }
  return t;
}

}  // namespace goq

// Acceptance checks. `goq_acceptance N` runs criterion N and prints one
// PASS/FAIL line; no argument runs all of them.
#include "cli.hpp"

#include "goq/experiments.hpp"
#include "goq/hr_scalar.hpp"
#include "goq/hr_vector.hpp"
#include "goq/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace goq;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int digits = 4) { return fmt_sig(v, digits); }

// Printed precision: one unit in the last printed digit of the reference.
double last_digit_unit(double ref) {
  std::ostringstream s;
  s << ref;
  const std::string t = s.str();
  const auto dot = t.find('.');
  if (dot == std::string::npos) return 1.0;
  return std::pow(10.0, -static_cast<double>(t.size() - dot - 1));
}

bool close_to_printed(double v, double ref) {
  return std::abs(v - ref) <= std::max(0.02 * std::abs(ref), last_digit_unit(ref));
}

Verdict c1_table1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = table1();
  const double secs = seconds_since(t0);
  const double uq_ref[] = {0.00399, 0.648, 0.648, 1, 0.0019, 0.083, 0.083, 0.24};
  const double cd_ref[] = {0.0488, 6.5943, 19.4565, 24, 0.4859, 18.75, 61.12, 48.50};
  int uq_ok = 0, cd_ok = 0;
  std::string misses;
  for (std::size_t i = 0; i < rows.size() && i < 8; ++i) {
    if (close_to_printed(rows[i].ol_uq_normalized, uq_ref[i]))
      ++uq_ok;
    else
      misses += " uq[" + std::to_string(i) + "]=" + num(rows[i].ol_uq_normalized) + "/" + num(uq_ref[i]);
    if (close_to_printed(rows[i].ol_cd_normalized, cd_ref[i]))
      ++cd_ok;
    else
      misses += " cd[" + std::to_string(i) + "]=" + num(rows[i].ol_cd_normalized) + "/" + num(cd_ref[i]);
  }
  return {rows.size() == 8 && uq_ok == 8 && cd_ok == 8 && secs < 60,
          "UQ " + std::to_string(uq_ok) + "/8, CD " + std::to_string(cd_ok) + "/8, " + num(secs, 3) + " s;" + misses};
}

Verdict c2_uniform_mse() {
  const GoalModel goal = builtin_goal("scalar-quadratic", nlohmann::json::object());
  const SourceModel src = builtin_source("uniform-box", {{"lo", 0.0}, {"hi", 1.0}});
  bool ok = true;
  std::string d;
  for (int M : {4, 16, 64}) {
    const LossReport r = monte_carlo_ol(goal, build_uniform_scalar(0, 1, M), src, 1000000, derive_seed(2, "c2"));
    const double expect = 1.0 / (12.0 * M * M);
    const double z = std::abs(r.mean_ol - expect) / r.std_error;
    ok = ok && z <= 3.0;
    d += " M=" + std::to_string(M) + ": " + num(r.mean_ol, 6) + " vs " + num(expect, 6) + " (" + num(z, 2) + " se)";
  }
  return {ok, d};
}

Verdict c3_holder() {
  const Table1Config tc;
  const std::vector<std::pair<std::string, nlohmann::json>> goals = {
      {"scalar-log", {}}, {"scalar-ee", {}}, {"scalar-sigmoid10", {}}, {"scalar-quadratic", {}}};
  const SourceModel sources[] = {builtin_source("uniform-box", {{"lo", tc.lo}, {"hi", tc.hi}}),
                                 builtin_source("trunc-exp", {{"lo", tc.lo}, {"hi", tc.hi}})};
  int cases = 0, ok = 0;
  std::string worst;
  for (const auto& [id, params] : goals) {
    const GoalModel goal = builtin_goal(id, params.is_null() ? nlohmann::json::object() : params);
    for (const auto& src : sources) {
      const DensityProfile rho = optimal_density(goal, src, 2);
      const double best = hr_ol_limit(goal, src, rho, 1, 2);
      for (double eps : {0.1, 0.3}) {
        const double width = tc.hi - tc.lo;
        const DensityProfile mix =
            DensityProfile::from_shape(tc.lo, tc.hi, [&](double g) { return (1 - eps) * rho(g) + eps / width; });
        const double v = hr_ol_limit(goal, src, mix, 1, 2);
        ++cases;
        // rho* may itself be uniform (mixture == rho*); allow rounding.
        if (best <= v + 1e-9) ++ok;
        else worst += " " + id + "/" + src.id() + "/eps=" + num(eps, 2);
      }
    }
  }
  return {ok == cases, std::to_string(ok) + "/" + std::to_string(cases) + " cases rho* <= mixture" + worst};
}

Verdict c4_fig2() {
  const auto rows = fig2();
  std::map<std::pair<int, std::string>, double> v;
  for (const auto& r : rows) v[{r.bits, r.goal}] = r.report.mean_relative_ol_pct;
  const double anchor = v[{1, "se-multiband"}];
  bool below = true;
  std::string d = "SE@1bit " + num(anchor) + "%; SE/EE:";
  for (int b = 1; b <= 6; ++b) {
    below = below && v[{b, "se-multiband"}] < v[{b, "ee-multiband"}];
    d += " " + num(v[{b, "se-multiband"}], 3) + "/" + num(v[{b, "ee-multiband"}], 3);
  }
  return {std::abs(anchor - 2.0) <= 1.0 && below, d};
}

Verdict c5_fig3() {
  const auto rows = fig3();
  std::map<int, std::map<std::string, double>> v;
  for (const auto& r : rows) v[r.M][r.method] = r.rel_ol;
  bool ordered = true;
  std::string d;
  for (auto& [M, m] : v) {
    ordered = ordered && m["goq"] < m["lloyd-max"];
    d += " M=" + std::to_string(M) + ":" + num(m["goq"], 3) + "/" + num(m["lloyd-max"], 3);
  }
  const bool anchor = v[5]["goq"] <= 20.0 && v[5]["lloyd-max"] >= 50.0;
  return {anchor && ordered, "GOQ/LM %" + d};
}

Verdict c6_sandwich() {
  const GoalModel goal = builtin_goal("quadratic-2d", nlohmann::json::object());
  const SourceModel src = builtin_source("exp-iid", {{"dim", 2}});
  bool ok = true;
  std::string d;
  for (int M : {64, 128}) {
    const OlBounds b = ol_bounds(goal, src, M);
    SolverConfig sc;
    sc.M = M;
    sc.mc_points = 50000;
    sc.seed = derive_seed(6, "c6-solve");
    const SolveResult r = solve(goal, src, sc);
    const MonteCarloEstimate e = hr_equivalent(goal, r.quantizer, src, 100000, derive_seed(6, "c6-eval"));
    ok = ok && e.mean >= b.lower && e.mean <= 1.15 * b.upper;
    d += " M=" + std::to_string(M) + ": " + num(b.lower) + " <= " + num(e.mean) + " (se " + num(e.std_error, 2) +
         ") <= 1.15*" + num(b.upper) + ";";
  }
  const OlBounds sq = ol_bounds(builtin_goal("squared-error", {{"dim", 2}}), src, 64);
  const double rel = std::abs(sq.upper - sq.lower) / sq.upper;
  ok = ok && rel <= 1e-9;
  d += " squared-error bounds rel gap " + num(rel, 2);
  return {ok, d};
}

Verdict c7_reductions() {
  const SourceModel src = builtin_source("uniform-box", {{"lo", 0.0}, {"hi", 1.0}});
  const GoalModel sq = builtin_goal("squared-error", {{"dim", 1}});
  double worst = 0.0;
  for (int M : {2, 4, 8}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SolverConfig sc;
      sc.M = M;
      sc.seed = seed;
      sc.metric = [](const Vec& g) { return Mat::Identity(g.size(), g.size()); };
      const Quantizer a = solve(sq, src, sc).quantizer;
      const Quantizer b = lloyd_max(src, M, LloydConfig{}, seed).quantizer;
      const auto rep = compare(sq, src, {a, b}, 100000, derive_seed(seed, "c7-eval"));
      worst = std::max(worst, std::abs(rep[0].mean_ol - rep[1].mean_ol) / rep[1].mean_ol);
    }
  }
  // Representative density of a scalar GOQ codebook against rho*.
  const GoalModel ee = builtin_goal("scalar-ee", nlohmann::json::object());
  const SourceModel texp = builtin_source("trunc-exp", nlohmann::json::object());
  SolverConfig sc;
  sc.M = 64;
  sc.mc_points = 100000;
  sc.init = InitRule::kmeans_seed;
  sc.seed = derive_seed(7, "c7-hist");
  const Quantizer q = solve(ee, texp, sc).quantizer;
  const DensityProfile rho = optimal_density(ee, texp, 2);
  constexpr int bins = 16;
  const double lo = texp.support().lo(0), hi = texp.support().hi(0), w = (hi - lo) / bins;
  std::vector<double> hist(bins, 0.0), ref(bins, 0.0);
  for (int m = 0; m < q.size(); ++m)
    hist[std::min(bins - 1, static_cast<int>((q.representative(m)(0) - lo) / w))] += 1.0 / q.size();
  for (int k = 0; k < bins; ++k) ref[k] = rho.cdf(lo + (k + 1) * w) - rho.cdf(lo + k * w);
  double mh = 0, mr = 0;
  for (int k = 0; k < bins; ++k) mh += hist[k] / bins, mr += ref[k] / bins;
  double sxy = 0, sxx = 0, syy = 0;
  for (int k = 0; k < bins; ++k) {
    sxy += (hist[k] - mh) * (ref[k] - mr);
    sxx += (hist[k] - mh) * (hist[k] - mh);
    syy += (ref[k] - mr) * (ref[k] - mr);
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return {worst < 0.01 && r > 0.95,
          "identity-E vs Lloyd-Max worst distortion gap " + num(100 * worst, 3) + "%; histogram Pearson r " + num(r)};
}

Verdict c8_fig6() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = fig6(Fig6Config{});
  const double secs = seconds_since(t0);
  bool le = true, mono = true, sat = false;
  int prev_gap = -1;
  std::string d;
  for (const auto& r : rows) {
    const int gap = r.kmeans.M - r.goq.M;
    le = le && r.goq.M <= r.kmeans.M;
    mono = mono && gap >= prev_gap;
    sat = sat || r.goq.saturated || r.kmeans.saturated;
    prev_gap = gap;
    d += " P=" + fmt_num(r.P) + ":" + std::to_string(r.goq.M) + "/" + std::to_string(r.kmeans.M);
  }
  return {le && mono && !sat && secs < 600, "M goq/kmeans" + d + "; " + num(secs, 3) + " s"};
}

Verdict c9_derivatives() {
  struct Case {
    std::string id;
    nlohmann::json params;
    Box box;
  };
  const std::vector<Case> cases = {
      {"scalar-quadratic", {}, Box::interval(0.1, 10)},
      {"scalar-log", {}, Box::interval(0.1, 10)},
      {"scalar-ee", {}, Box::interval(0.1, 10)},
      {"scalar-ee", {{"eta", 3.0}}, Box::interval(0.1, 10)},
      {"scalar-sigmoid10", {}, Box::interval(0.1, 10)},
      {"ee-multiband", {}, Box::cube(2, 0.05, 3.0)},
      {"se-multiband", {}, Box::cube(2, 0.05, 3.0)},
      {"quadratic-2d", {}, Box::cube(2, 0.0, 3.0)},
      {"pcs-lp", {}, Box::cube(24, 0.0, 4.0)},
      {"pcs-lp", {{"P", 8.0}}, Box::cube(24, 0.0, 4.0)},
      {"squared-error", {{"dim", 3}}, Box::cube(3, -2.0, 2.0)},
  };
  double worst = 0.0;
  std::string where;
  int checked = 0;
  for (const auto& c : cases) {
    const GoalModel goal = builtin_goal(c.id, c.params.is_null() ? nlohmann::json::object() : c.params);
    Rng rng(derive_seed(9, c.id + c.params.dump()));
    for (int k = 0; k < 100;) {
      Vec g(c.box.dim());
      for (int i = 0; i < g.size(); ++i) g(i) = c.box.lo(i) + rng.uniform() * (c.box.hi(i) - c.box.lo(i));
      // Skip probes whose second-order stencil (reach 2h, h = 1e-3 max(1, |g|)) would straddle a kink.
      if (!goal.smooth_at(g, 3e-3 * std::max(1.0, g.cwiseAbs().maxCoeff()))) continue;
      const double m = cross_validate(goal, g).worst();
      ++k;
      ++checked;
      if (m > worst) {
        worst = m;
        where = c.id + (c.params.is_null() ? "" : c.params.dump());
      }
    }
  }
  return {worst <= 1e-4, std::to_string(checked) + " probes, worst scaled mismatch " + num(worst, 3) + " (" + where + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Verdict c10_determinism() {
  const fs::path root = fs::temp_directory_path() / ("goq-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> runs = {
      {"table1"},
      {"density"},
      {"solve", "--M", "5", "--seed", "1"},
      {"cluster", "--M", "4", "--seed", "1", "--goal-params", R"({"P":4})"},
      {"fig2"},
      {"fig3"},
      {"fig4"},
      {"fig6"},
  };
  int identical = 0, total = 0;
  std::string d;
  auto run_twice = [&](const std::string& name, std::vector<std::string> args) {
    for (const char* rep : {"a", "b"}) {
      std::vector<std::string> a = args;
      a.push_back("--out");
      a.push_back((root / rep / name).string());
      const int rc = cli::run(a);
      if (rc != 0) d += " " + name + " exit " + std::to_string(rc);
    }
    for (const auto& e : fs::directory_iterator(root / "a" / name)) {
      if (e.path().extension() != ".csv") continue;
      ++total;
      if (slurp(e.path()) == slurp(root / "b" / name / e.path().filename()))
        ++identical;
      else
        d += " differs: " + name + "/" + e.path().filename().string();
    }
  };
  for (const auto& r : runs) run_twice(r[0], r);
  const std::string q = (root / "a" / "solve" / "quantizer.json").string();
  run_twice("evaluate", {"evaluate", "--quantizer", q, "--n", "10000", "--seed", "2"});
  run_twice("compare", {"compare", "--quantizers", q + "," + q, "--n", "10000", "--seed", "2"});
  fs::remove_all(root);
  return {total > 0 && identical == total && d.find("exit") == std::string::npos,
          std::to_string(identical) + "/" + std::to_string(total) + " CSV artifacts byte-identical" + d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"table1 reproduction", c1_table1},
      {"scalar HR classical limit", c2_uniform_mse},
      {"Hoelder optimality of rho*", c3_holder},
      {"fig2 anchor and ordering", c4_fig2},
      {"fig3 GOQ vs Lloyd-Max", c5_fig3},
      {"bounds sandwich", c6_sandwich},
      {"solver reductions", c7_reductions},
      {"fig6 directional", c8_fig6},
      {"derivative checks", c9_derivatives},
      {"CLI determinism", c10_determinism},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
  int failed = 0;
  for (int k : which) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "no criterion " << k << "\n";
      return 2;
    }
    const auto& [name, check] = criteria[k - 1];
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << k << " (" << name << "): " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
              << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed ? 1 : 0;
}

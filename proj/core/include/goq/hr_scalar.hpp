#pragma once

#include "goq/csv.hpp"
#include "goq/density.hpp"
#include "goq/goal_model.hpp"
#include "goq/prob_model.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace goq {

/// p(g) = (chi'(g))^kappa f^(kappa)(chi(g); g) phi(g), scalar goals.
ScalarFn value_density(const GoalModel& goal, const SourceModel& source, int kappa);

/// rho* proportional to p^{1/(kappa+1)}.
DensityProfile optimal_density(const GoalModel& goal, const SourceModel& source, int kappa);

/// 1/((2M)^kappa (kappa+1)!) int rho^{-kappa} p, without alpha_f.
double hr_ol_limit(const GoalModel& goal, const SourceModel& source, const DensityProfile& rho, int M, int kappa);
/// The same limit for rho = rho*: (int p^{1/(kappa+1)})^{kappa+1} / ((2M)^kappa (kappa+1)!).
double hr_ol_limit_optimal(const GoalModel& goal, const SourceModel& source, int M, int kappa);

/// alpha_f^UQ: reciprocal of the HR loss of the uniform density at the same M.
double normalizer_uq(const GoalModel& goal, const SourceModel& source, int kappa, int M = 1);

struct ConstantDecision {
  double x_bar = 0.0;
  /// E_g[f(x_bar; g) - f(chi(g); g)]
  double gap = 0.0;
};
ConstantDecision best_constant_decision(const GoalModel& goal, const SourceModel& source);
/// alpha_f^CD = (2M)^kappa kappa! (kappa+1) / E_g[f(x_bar; g) - f(chi(g); g)].
double normalizer_cd(const GoalModel& goal, const SourceModel& source, int kappa, int M = 1);

struct HrScalarReport {
  std::string goal;
  std::string pdf;
  std::string odf;
  int kappa = 2;
  int M = 1;
  double ol_limit_raw = 0.0;  // rho* limit, alpha_f = 1
  double alpha_uq = 0.0;
  double alpha_cd = 0.0;
  double ol_uq_normalized = 0.0;
  double ol_cd_normalized = 0.0;
  double x_bar = 0.0;
  /// Printed reference values (NaN when not applicable).
  double reference_uq = 0.0;
  double reference_cd = 0.0;
};

HrScalarReport hr_scalar_report(const GoalModel& goal, const SourceModel& source, int M = 1, int probes = 100);

struct Table1Config {
  double lo = 0.1;
  double hi = 10.0;
  int M = 1;
  int kappa_probes = 100;
  int threads = 0;
};

/// The eight (goal, pdf) rows of the scalar comparison table, in print order.
std::vector<HrScalarReport> table1(const Table1Config& cfg = {});
CsvTable table1_csv(const std::vector<HrScalarReport>& rows);
nlohmann::json table1_json(const std::vector<HrScalarReport>& rows);

/// Sampled (g, rho(g)) table for plotting.
CsvTable density_csv(const DensityProfile& rho, int points);

}  // namespace goq

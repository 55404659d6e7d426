#include "goq/experiments.hpp"

#include "goq/hr_vector.hpp"
#include "goq/rng.hpp"

#include <cmath>

namespace goq {

std::vector<Fig2Row> fig2(const Fig2Config& cfg) {
  if (cfg.max_bits < 1) throw ConfigError("fig2: max_bits must be >= 1");
  const SourceModel source = builtin_source("rayleigh-gain", {{"dim", cfg.bands}, {"law", cfg.law}});
  const GoalModel se = builtin_goal("se-multiband", {{"S", cfg.bands}, {"P_max", cfg.p_max}, {"sigma2", cfg.sigma2}});
  const GoalModel ee = builtin_goal(
      "ee-multiband", {{"S", cfg.bands}, {"P_max", cfg.p_max}, {"sigma2", cfg.sigma2}, {"c", cfg.c}});
  const Mat pts = source.sample(cfg.n, derive_seed(cfg.seed, "fig2-sample"));
  EvalOptions eo;
  eo.threads = cfg.threads;
  std::vector<Fig2Row> rows;
  for (int b = 1; b <= cfg.max_bits; ++b) {
    const Quantizer q = build_uniform_product(source.support(), 1 << b);
    for (const GoalModel* g : {&se, &ee}) {
      Fig2Row row;
      row.bits = b;
      row.goal = g->id();
      row.report = evaluate_points(
          *g, [&q](const Vec& v) { return q.quantize(v); }, pts, eo);
      row.report.quantizer_tag = q.provenance();
      row.report.M = q.size();
      row.report.seed = cfg.seed;
      rows.push_back(row);
    }
  }
  return rows;
}

CsvTable fig2_csv(const std::vector<Fig2Row>& rows) {
  CsvTable t({"bits", "goal", "rel_ol"});
  for (const auto& r : rows)
    t.add_row({std::to_string(r.bits), r.goal, fmt_sig(r.report.mean_relative_ol_pct, 6)});
  return t;
}

SolveResult fig3_goq(const GoalModel& goal, const Mat& points, const Box& support, int M, int restarts, bool polish,
                     std::uint64_t seed, int threads) {
  std::optional<SolveResult> best;
  double best_loss = 0.0;
  for (int k = 0; k < restarts; ++k) {
    SolverConfig cfg;
    cfg.M = M;
    cfg.seed = derive_seed(seed, "fig3-goq-" + std::to_string(k));
    cfg.init = InitRule::kmeans_seed;
    cfg.threads = threads;
    SolveResult r = solve_on(goal, points, support, cfg);
    if (polish) {
      SolverConfig ex = cfg;
      ex.loss = LossMode::exact;
      ex.init = InitRule::explicit_reps;
      ex.explicit_init = r.quantizer.representatives();
      ex.max_iters = 50;
      ex.pattern_tol = 1e-6;
      r = solve_on(goal, points, support, ex);
    }
    // Rank restarts by the exact in-sample loss.
    const Quantizer& q = r.quantizer;
    EvalOptions eo;
    eo.threads = threads;
    const double loss = evaluate_points(
                            goal, [&q](const Vec& g) { return q.quantize(g); }, points, eo)
                            .mean_ol;
    if (!best || loss < best_loss) {
      best = std::move(r);
      best_loss = loss;
    }
  }
  best->quantizer.set_provenance("goq").set_seed(seed);
  return std::move(*best);
}

std::vector<Fig3Row> fig3(const Fig3Config& cfg) {
  if (cfg.m_min < 1 || cfg.m_max < cfg.m_min) throw ConfigError("fig3: empty M range");
  if (cfg.restarts < 1) throw ConfigError("fig3: restarts must be >= 1");
  const GoalModel goal = builtin_goal("quadratic-2d", nlohmann::json::object());
  const SourceModel source = builtin_source("exp-iid", {{"dim", 2}});
  const Mat pts = source.sample(cfg.n, derive_seed(cfg.seed, "fig3-sample"));
  const Mat holdout = source.sample(cfg.holdout_n, derive_seed(cfg.seed, "fig3-holdout"));
  EvalOptions eo;
  eo.threads = cfg.threads;
  std::vector<Fig3Row> rows;
  for (int M = cfg.m_min; M <= cfg.m_max; ++M) {
    LloydConfig lc;
    lc.threads = cfg.threads;
    const Quantizer lm = kmeans(pts, source.support(), M, lc, derive_seed(cfg.seed, "fig3-lloyd-" + std::to_string(M)))
                             .quantizer.set_provenance("lloyd-max");
    const Quantizer gq = fig3_goq(goal, pts, source.support(), M, cfg.restarts, cfg.polish,
                                  derive_seed(cfg.seed, "fig3-goq-M" + std::to_string(M)), cfg.threads)
                             .quantizer;
    for (const Quantizer* q : {&lm, &gq}) {
      Fig3Row row;
      row.M = M;
      row.method = q->provenance();
      auto fn = [q](const Vec& g) { return q->quantize(g); };
      row.report = evaluate_points(goal, fn, pts, eo);
      row.report.quantizer_tag = q->provenance();
      row.report.M = M;
      row.report.seed = cfg.seed;
      row.rel_ol = row.report.ratio_of_means_pct;
      row.holdout_rel_ol = evaluate_points(goal, fn, holdout, eo).ratio_of_means_pct;
      rows.push_back(row);
    }
  }
  return rows;
}

CsvTable fig3_csv(const std::vector<Fig3Row>& rows) {
  CsvTable t({"M", "method", "rel_ol"});
  for (const auto& r : rows) t.add_row({std::to_string(r.M), r.method, fmt_sig(r.rel_ol, 6)});
  return t;
}

CsvTable fig3_holdout_csv(const std::vector<Fig3Row>& rows) {
  CsvTable t({"M", "method", "rel_ol"});
  for (const auto& r : rows) t.add_row({std::to_string(r.M), r.method, fmt_sig(r.holdout_rel_ol, 6)});
  return t;
}

CsvTable fig4(const Fig4Config& cfg) {
  if (cfg.grid < 2 || !(cfg.hi > 0)) throw ConfigError("fig4: grid must be >= 2 and hi > 0");
  const GoalModel goal = builtin_goal("quadratic-2d", nlohmann::json::object());
  const SourceModel source = builtin_source("exp-iid", {{"dim", 2}});
  CsvTable t({"g1", "g2", "phi", "lambda_max_phi"});
  for (int i = 0; i < cfg.grid; ++i) {
    for (int j = 0; j < cfg.grid; ++j) {
      Vec g(2);
      g << cfg.hi * i / (cfg.grid - 1), cfg.hi * j / (cfg.grid - 1);
      const double phi = source.pdf(g);
      const double lmax = weight_matrices(goal, g).lambda_max;
      t.add_row({fmt_sig(g(0), 6), fmt_sig(g(1), 6), fmt_sig(phi, 8), fmt_sig(lmax * phi, 8)});
    }
  }
  return t;
}

std::vector<RequiredRow> fig6(const Fig6Config& cfg, const SourceModel* dataset) {
  if (cfg.P.empty()) throw ConfigError("fig6: empty P sweep");
  std::optional<SourceModel> own;
  if (!dataset) {
    own = builtin_source("synthetic-load", cfg.dataset);
    dataset = &*own;
  }
  const int dim = dataset->param_dim();
  SolverConfig sc;
  sc.seed = derive_seed(cfg.seed, "fig6");
  sc.threads = cfg.threads;
  sc.max_iters = 50;
  return required_clusters_sweep(
      [&](double P) { return builtin_goal("pcs-lp", {{"dim", dim}, {"P", P}, {"E", cfg.demand}}); }, *dataset, cfg.P,
      cfg.target_pct, cfg.m_min, std::min<int>(cfg.m_max, static_cast<int>(dataset->size())), sc);
}

CsvTable fig6_csv(const std::vector<RequiredRow>& rows) {
  CsvTable t({"P", "method", "required_M", "saturated"});
  for (const auto& r : rows) {
    t.add_row({fmt_num(r.P), "goq", std::to_string(r.goq.M), r.goq.saturated ? "1" : "0"});
    t.add_row({fmt_num(r.P), "kmeans", std::to_string(r.kmeans.M), r.kmeans.saturated ? "1" : "0"});
  }
  return t;
}

}  // namespace goq

#pragma once

#include "goq/csv.hpp"
#include "goq/eval_bench.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace goq {

// Figure-level drivers. Every random stage draws from a named substream of
// the top-level seed.

struct Fig2Config {
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  int max_bits = 6;
  int bands = 2;
  double p_max = 5.0;
  double sigma2 = 1.0;
  double c = 1.0;
  std::string law = "amplitude";
  int threads = 0;
};

struct Fig2Row {
  int bits = 0;
  std::string goal;
  LossReport report;
};

/// Per-gain uniform scalar quantizers with 2^bits levels over the gain support.
std::vector<Fig2Row> fig2(const Fig2Config& cfg = {});
CsvTable fig2_csv(const std::vector<Fig2Row>& rows);

struct Fig3Config {
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  int m_min = 2;
  int m_max = 10;
  int restarts = 5;
  bool polish = true;  // exact-loss refinement after the approximate solve
  std::size_t holdout_n = 10000;
  int threads = 0;
};

struct Fig3Row {
  int M = 0;
  std::string method;  // "lloyd-max" | "goq"
  double rel_ol = 0.0;          // ratio of means, in-sample
  double holdout_rel_ol = 0.0;  // ratio of means, fresh sample
  LossReport report;
};

std::vector<Fig3Row> fig3(const Fig3Config& cfg = {});
CsvTable fig3_csv(const std::vector<Fig3Row>& rows);
CsvTable fig3_holdout_csv(const std::vector<Fig3Row>& rows);

/// One fig3 GOQ codebook: best of `restarts` approximate solves, each
/// optionally polished with the exact loss.
SolveResult fig3_goq(const GoalModel& goal, const Mat& points, const Box& support, int M, int restarts, bool polish,
                     std::uint64_t seed, int threads);

struct Fig4Config {
  int grid = 41;
  double hi = 4.0;
  int threads = 0;
};

/// (g1, g2, phi, lambda_max * phi) for quadratic-2d under exp-iid.
CsvTable fig4(const Fig4Config& cfg = {});

struct Fig6Config {
  std::vector<double> P = {4, 8, 12, 16, 20};
  double target_pct = 5.0;
  int m_min = 1;
  int m_max = 300;
  double demand = 30.0;
  nlohmann::json dataset = {{"count", 300}, {"dim", 24}, {"seed", 2024}};
  std::uint64_t seed = 1;
  int threads = 0;
};

std::vector<RequiredRow> fig6(const Fig6Config& cfg, const SourceModel* dataset = nullptr);
CsvTable fig6_csv(const std::vector<RequiredRow>& rows);

}  // namespace goq

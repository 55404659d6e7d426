#include "cli.hpp"

#include "goq/experiments.hpp"
#include "goq/hr_scalar.hpp"
#include "goq/numerics.hpp"
#include "goq/rng.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace goq::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum class Kind { integer, number, text, boolean, object, list };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::integer:
      return "integer";
    case Kind::number:
      return "number";
    case Kind::text:
      return "string";
    case Kind::boolean:
      return "boolean";
    case Kind::object:
      return "object";
    case Kind::list:
      return "array";
  }
  return "?";
}

struct Field {
  std::string key;
  Kind kind;
  json def;
  std::string help;
};

class Output;
using Runner = std::function<int(const json& cfg, Output& out)>;

struct Command {
  std::string name;
  std::string help;
  std::vector<Field> fields;
  Runner run;
};

bool matches(const json& v, Kind k) {
  switch (k) {
    case Kind::integer:
      return v.is_number_integer();
    case Kind::number:
      return v.is_number();
    case Kind::text:
      return v.is_string();
    case Kind::boolean:
      return v.is_boolean();
    case Kind::object:
      return v.is_object();
    case Kind::list:
      return v.is_array();
  }
  return false;
}

json parse_flag(const Field& f, const std::string& text) {
  const std::string where = "--" + f.key + ": ";
  try {
    switch (f.kind) {
      case Kind::integer: {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
      }
      case Kind::number: {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
      }
      case Kind::text:
        return text;
      case Kind::boolean:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        throw std::invalid_argument(text);
      case Kind::object: {
        json v = json::parse(text);
        if (!v.is_object()) throw std::invalid_argument(text);
        return v;
      }
      case Kind::list: {
        // Either a JSON array or a comma-separated list.
        if (!text.empty() && text.front() == '[') return json::parse(text);
        json arr = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos == item.size()) {
              arr.push_back(v);
              continue;
            }
          } catch (const std::exception&) {
          }
          arr.push_back(item);
        }
        return arr;
      }
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(where + "expected " + kind_name(f.kind) + ", got '" + text + "'");
}

/// Output directory, artifact list and manifest.
class Output {
 public:
  Output(fs::path dir, std::string command, json config)
      : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
    f << text;
    artifacts_.push_back(name);
  }
  void write(const std::string& name, const CsvTable& t) { write(name, t.str()); }
  void write(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void seed(const std::string& stage, std::uint64_t s) { seeds_[stage] = s; }
  const fs::path& dir() const { return dir_; }

  void finish(double seconds, int status) {
    json m = {{"command", command_},
              {"version", "0.1.0"},
              {"config", config_},
              {"seeds", seeds_},
              {"artifacts", artifacts_},
              {"threads", resolve_threads(config_.value("threads", 0))},
              {"status", status},
              {"wall_time_s", seconds}};
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
    std::ofstream c(dir_ / "config.json", std::ios::binary);
    c << config_.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  std::string command_;
  json config_;
  std::vector<std::string> artifacts_;
  json seeds_ = json::object();
};

std::uint64_t seed_of(const json& cfg) {
  const auto s = cfg.at("seed").get<long long>();
  if (s < 0) throw ConfigError("seed: must be >= 0");
  return static_cast<std::uint64_t>(s);
}

int positive_int(const json& cfg, const std::string& key, int min = 1) {
  const long long v = cfg.at(key).get<long long>();
  if (v < min || v > 100000000) throw ConfigError(key + ": must be >= " + std::to_string(min));
  return static_cast<int>(v);
}

SourceModel load_dataset(const std::string& path) {
  CsvDataset d = read_csv_dataset(path);
  return SourceModel::empirical("csv", std::move(d.data), {{"path", path}});
}

/// Source from a dataset path or a built-in id.
SourceModel source_from(const json& cfg) {
  if (cfg.contains("dataset") && !cfg["dataset"].get<std::string>().empty())
    return load_dataset(cfg["dataset"].get<std::string>());
  const std::string id = cfg.at("source").get<std::string>();
  if (id.empty()) throw ConfigError("source: required");
  return builtin_source(id, cfg.at("source_params"));
}

GoalModel goal_from(const json& cfg) {
  const std::string id = cfg.at("goal").get<std::string>();
  if (id.empty()) throw ConfigError("goal: required");
  return builtin_goal(id, cfg.at("goal_params"));
}

json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream f(path);
  if (!f) throw ConfigError(what + ": cannot read '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Quantizer file plus the goal/source context written by solve and cluster.
struct LoadedQuantizer {
  Quantizer q;
  json context;
};

LoadedQuantizer load_quantizer(const std::string& path) {
  const json j = read_json_file(path, "quantizer");
  return {Quantizer::from_json(j), j.value("context", json::object())};
}

/// Fills empty goal/source fields from a quantizer's context.
json with_context(json cfg, const json& context) {
  if (cfg["goal"].get<std::string>().empty() && context.contains("goal")) {
    cfg["goal"] = context["goal"].at("id");
    cfg["goal_params"] = context["goal"].at("params");
  }
  if (cfg["source"].get<std::string>().empty() && cfg["dataset"].get<std::string>().empty() &&
      context.contains("source")) {
    const json& s = context["source"];
    if (s.value("id", "") == "csv") {
      cfg["dataset"] = s.at("params").at("path");
    } else {
      cfg["source"] = s.at("id");
      cfg["source_params"] = s.at("params");
    }
  }
  return cfg;
}

json source_context(const SourceModel& s) { return {{"id", s.id()}, {"params", s.params()}}; }

SolverConfig solver_config(const json& cfg) {
  SolverConfig sc;
  sc.M = positive_int(cfg, "M");
  sc.max_iters = positive_int(cfg, "max_iters");
  sc.restarts = positive_int(cfg, "restarts");
  sc.seed = seed_of(cfg);
  sc.threads = cfg.at("threads").get<int>();
  if (cfg.contains("loss")) sc.loss = loss_mode_from_string(cfg["loss"].get<std::string>());
  if (cfg.contains("init")) sc.init = init_rule_from_string(cfg["init"].get<std::string>());
  if (cfg.contains("mc_points")) sc.mc_points = static_cast<std::size_t>(positive_int(cfg, "mc_points"));
  if (cfg.contains("epsilon")) sc.epsilon = cfg["epsilon"].get<double>();
  if (cfg.contains("inner_steps")) sc.inner_steps = positive_int(cfg, "inner_steps");
  sc.validate();
  return sc;
}

CsvTable labels_csv(const std::vector<int>& labels) {
  CsvTable t({"index", "region"});
  for (std::size_t i = 0; i < labels.size(); ++i) t.add_row({std::to_string(i), std::to_string(labels[i])});
  return t;
}

// ---- commands ----

int cmd_table1(const json& cfg, Output& out) {
  Table1Config tc;
  tc.lo = cfg.at("lo").get<double>();
  tc.hi = cfg.at("hi").get<double>();
  tc.M = positive_int(cfg, "M");
  tc.kappa_probes = positive_int(cfg, "kappa_probes");
  tc.threads = cfg.at("threads").get<int>();
  const auto rows = table1(tc);
  out.write("table1.csv", table1_csv(rows));
  out.write("table1.json", table1_json(rows));
  return 0;
}

int cmd_density(const json& cfg, Output& out) {
  const GoalModel goal = goal_from(cfg);
  const SourceModel source = source_from(cfg);
  if (goal.param_dim() != 1 || source.param_dim() != 1) throw ConfigError("density: scalar goal and source required");
  int kappa = cfg.at("kappa").get<int>();
  if (kappa <= 0) kappa = detect_kappa(goal, source, 100, seed_of(cfg));
  out.seed("kappa-probes", seed_of(cfg));
  const int points = positive_int(cfg, "points", 2);
  const ScalarFn p = value_density(goal, source, kappa);
  const DensityProfile rho = optimal_density(goal, source, kappa);
  CsvTable t({"g", "phi", "value_density", "rho_opt"});
  const double lo = source.support().lo(0), hi = source.support().hi(0);
  for (int k = 0; k < points; ++k) {
    const double g = lo + (hi - lo) * k / (points - 1);
    t.add_row({fmt_num(g), fmt_sig(source.pdf(scalar_vec(g)), 10), fmt_sig(p(g), 10), fmt_sig(rho(g), 10)});
  }
  out.write("density.csv", t);
  return 0;
}

int cmd_solve(const json& cfg, Output& out) {
  const GoalModel goal = goal_from(cfg);
  const SourceModel source = source_from(cfg);
  const SolverConfig sc = solver_config(cfg);
  out.seed("solve", sc.seed);
  out.seed("solve-sample", derive_seed(sc.seed, "solve-sample"));
  const SolveResult r = solve(goal, source, sc);
  json q = r.quantizer.to_json();
  q["context"] = {{"goal", goal.to_json()}, {"source", source_context(source)}};
  out.write("quantizer.json", q);
  out.write("trace.csv", trace_csv(r.trace));
  return 0;
}

int cmd_cluster(const json& cfg, Output& out) {
  const GoalModel goal = goal_from(cfg);
  const SourceModel data = source_from(cfg);
  if (!data.is_empirical()) throw ConfigError("cluster: dataset or an empirical source (synthetic-load) required");
  SolverConfig sc = solver_config(cfg);
  sc.pattern_tol = cfg.at("pattern_tol").get<double>();
  out.seed("cluster", sc.seed);
  const SolveResult r = cluster(goal, data, sc);
  json q = r.quantizer.to_json();
  q["context"] = {{"goal", goal.to_json()}, {"source", source_context(data)}};
  out.write("quantizer.json", q);
  out.write("trace.csv", trace_csv(r.trace));
  out.write("labels.csv", labels_csv(r.labels));
  return 0;
}

int cmd_evaluate(const json& raw, Output& out) {
  const std::string path = raw.at("quantizer").get<std::string>();
  if (path.empty()) throw ConfigError("quantizer: required");
  const LoadedQuantizer lq = load_quantizer(path);
  const json cfg = with_context(raw, lq.context);
  const GoalModel goal = goal_from(cfg);
  const SourceModel source = source_from(cfg);
  const auto n = static_cast<std::size_t>(positive_int(cfg, "n"));
  out.seed("evaluate", seed_of(cfg));
  EvalOptions eo;
  eo.threads = cfg.at("threads").get<int>();
  const LossReport r = monte_carlo_ol(goal, lq.q, source, n, seed_of(cfg), eo);
  out.write("report.json", to_json(r));
  out.write("report.csv", reports_csv({r}));
  return 0;
}

int cmd_compare(const json& raw, Output& out) {
  const json& paths = raw.at("quantizers");
  if (paths.empty()) throw ConfigError("quantizers: at least one path required");
  std::vector<Quantizer> qs;
  json context = json::object();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!paths[i].is_string()) throw ConfigError("quantizers[" + std::to_string(i) + "]: expected string");
    LoadedQuantizer lq = load_quantizer(paths[i].get<std::string>());
    if (i == 0) context = lq.context;
    qs.push_back(std::move(lq.q));
  }
  const json cfg = with_context(raw, context);
  const GoalModel goal = goal_from(cfg);
  const SourceModel source = source_from(cfg);
  out.seed("compare", seed_of(cfg));
  EvalOptions eo;
  eo.threads = cfg.at("threads").get<int>();
  const auto reports =
      compare(goal, source, qs, static_cast<std::size_t>(positive_int(cfg, "n")), seed_of(cfg), eo);
  out.write("compare.csv", reports_csv(reports));
  return 0;
}

int cmd_fig2(const json& cfg, Output& out) {
  Fig2Config c;
  c.n = static_cast<std::size_t>(positive_int(cfg, "n"));
  c.seed = seed_of(cfg);
  c.max_bits = positive_int(cfg, "max_bits");
  c.bands = positive_int(cfg, "bands");
  c.p_max = cfg.at("p_max").get<double>();
  c.sigma2 = cfg.at("sigma2").get<double>();
  c.c = cfg.at("c").get<double>();
  c.law = cfg.at("law").get<std::string>();
  c.threads = cfg.at("threads").get<int>();
  out.seed("fig2-sample", derive_seed(c.seed, "fig2-sample"));
  const auto rows = fig2(c);
  out.write("fig2.csv", fig2_csv(rows));
  std::vector<LossReport> reports;
  for (const auto& r : rows) reports.push_back(r.report);
  out.write("fig2_reports.csv", reports_csv(reports));
  return 0;
}

int cmd_fig3(const json& cfg, Output& out) {
  Fig3Config c;
  c.n = static_cast<std::size_t>(positive_int(cfg, "n"));
  c.seed = seed_of(cfg);
  c.m_min = positive_int(cfg, "m_min");
  c.m_max = positive_int(cfg, "m_max");
  c.restarts = positive_int(cfg, "restarts");
  c.polish = cfg.at("polish").get<bool>();
  c.holdout_n = static_cast<std::size_t>(positive_int(cfg, "holdout_n"));
  c.threads = cfg.at("threads").get<int>();
  out.seed("fig3-sample", derive_seed(c.seed, "fig3-sample"));
  out.seed("fig3-holdout", derive_seed(c.seed, "fig3-holdout"));
  const auto rows = fig3(c);
  out.write("fig3.csv", fig3_csv(rows));
  out.write("fig3_holdout.csv", fig3_holdout_csv(rows));
  return 0;
}

int cmd_fig4(const json& cfg, Output& out) {
  Fig4Config c;
  c.grid = positive_int(cfg, "grid", 2);
  c.hi = cfg.at("hi").get<double>();
  c.threads = cfg.at("threads").get<int>();
  out.write("density.csv", fig4(c));
  return 0;
}

int cmd_fig6(const json& cfg, Output& out) {
  Fig6Config c;
  c.P.clear();
  for (const auto& p : cfg.at("P")) {
    if (!p.is_number()) throw ConfigError("P: expected numbers");
    c.P.push_back(p.get<double>());
  }
  c.target_pct = cfg.at("target").get<double>();
  c.m_min = positive_int(cfg, "m_min");
  c.m_max = positive_int(cfg, "m_max");
  c.demand = cfg.at("demand").get<double>();
  c.dataset = cfg.at("dataset_params");
  c.seed = seed_of(cfg);
  c.threads = cfg.at("threads").get<int>();
  out.seed("fig6", derive_seed(c.seed, "fig6"));
  std::optional<SourceModel> data;
  if (const auto path = cfg.at("dataset").get<std::string>(); !path.empty()) data = load_dataset(path);
  const auto rows = fig6(c, data ? &*data : nullptr);
  out.write("fig6.csv", fig6_csv(rows));
  CsvTable path({"P", "method", "M", "rel_ol"});
  bool saturated = false;
  for (const auto& r : rows) {
    for (const auto* m : {&r.goq, &r.kmeans}) {
      for (const auto& [M, v] : m->path)
        path.add_row({fmt_num(r.P), m == &r.goq ? "goq" : "kmeans", std::to_string(M), fmt_sig(v, 6)});
      saturated = saturated || m->saturated;
    }
  }
  out.write("fig6_path.csv", path);
  if (saturated) {
    std::cerr << "goq fig6: target not reached within the M range for some P (see fig6.csv)\n";
    return 2;
  }
  return 0;
}

std::vector<Field> common_fields(const std::string& out_default) {
  return {{"out", Kind::text, out_default, "output directory"},
          {"seed", Kind::integer, 1, "top-level seed"},
          {"threads", Kind::integer, 0, "worker cap (0: GOQ_THREADS, else 1)"}};
}

std::vector<Field> goal_source_fields(const std::string& goal, const json& goal_params, const std::string& source,
                                      const json& source_params) {
  return {{"goal", Kind::text, goal, "goal id"},
          {"goal_params", Kind::object, goal_params, "goal parameters (JSON object)"},
          {"source", Kind::text, source, "source id"},
          {"source_params", Kind::object, source_params, "source parameters (JSON object)"},
          {"dataset", Kind::text, "", "CSV dataset path (overrides source)"}};
}

std::vector<Command> commands() {
  auto join = [](std::vector<Field> a, const std::vector<Field>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const json obj = json::object();
  std::vector<Command> cmds;
  cmds.push_back({"table1", "Normalized HR optimality loss for the eight scalar reference rows",
                  join(common_fields("out/table1"),
                       {{"lo", Kind::number, 0.1, "support lower end"},
                        {"hi", Kind::number, 10.0, "support upper end"},
                        {"M", Kind::integer, 1, "number of regions"},
                        {"kappa_probes", Kind::integer, 100, "probes for kappa detection"}}),
                  cmd_table1});
  cmds.push_back({"density", "Value density and OL-optimal point density of a scalar goal",
                  join(join(common_fields("out/density"),
                            goal_source_fields("scalar-log", obj, "uniform-box", {{"lo", 0.1}, {"hi", 10.0}})),
                       {{"kappa", Kind::integer, 0, "kappa (0: detect)"},
                        {"points", Kind::integer, 201, "grid points"}}),
                  cmd_density});
  const std::vector<Field> solver = {{"M", Kind::integer, 5, "number of regions"},
                                     {"max_iters", Kind::integer, 200, "iteration cap"},
                                     {"restarts", Kind::integer, 1, "seeded multi-start count"}};
  cmds.push_back({"solve", "Goal-oriented quantizer design",
                  join(join(join(common_fields("out/solve"),
                                 goal_source_fields("quadratic-2d", obj, "exp-iid", {{"dim", 2}})),
                            solver),
                       {{"loss", Kind::text, "approx-Ltilde", "approx-Ltilde | exact-L"},
                        {"init", Kind::text, "auto", "auto | density-quantile | kmeans-seed"},
                        {"mc_points", Kind::integer, 10000, "training sample size (analytic sources)"},
                        {"epsilon", Kind::number, 0.0, "stop threshold (0: 1e-8 scalar, 1e-6 vector)"},
                        {"inner_steps", Kind::integer, 25, "gradient steps per iteration"}}),
                  cmd_solve});
  cmds.push_back({"cluster", "Goal-oriented clustering of a dataset (exact loss)",
                  join(join(join(common_fields("out/cluster"),
                                 goal_source_fields("pcs-lp", {{"P", 2.0}}, "synthetic-load", obj)),
                            solver),
                       {{"pattern_tol", Kind::number, 1e-6, "pattern search stop radius"}}),
                  cmd_cluster});
  cmds.push_back({"evaluate", "Monte Carlo optimality loss of a saved quantizer",
                  join(join(common_fields("out/evaluate"), goal_source_fields("", obj, "", obj)),
                       {{"quantizer", Kind::text, "", "quantizer JSON path"},
                        {"n", Kind::integer, 10000, "Monte Carlo samples"}}),
                  cmd_evaluate});
  cmds.push_back({"compare", "Paired comparison of saved quantizers",
                  join(join(common_fields("out/compare"), goal_source_fields("", obj, "", obj)),
                       {{"quantizers", Kind::list, json::array(), "quantizer JSON paths"},
                        {"n", Kind::integer, 10000, "Monte Carlo samples"}}),
                  cmd_compare});
  cmds.push_back({"fig2", "Relative OL of uniform quantizers, SE vs EE goals",
                  join(common_fields("out/fig2"), {{"n", Kind::integer, 10000, "channel realizations"},
                                                   {"max_bits", Kind::integer, 6, "largest bits per gain"},
                                                   {"bands", Kind::integer, 2, "number of bands S"},
                                                   {"p_max", Kind::number, 5.0, "power budget"},
                                                   {"sigma2", Kind::number, 1.0, "noise power"},
                                                   {"c", Kind::number, 1.0, "EE constant"},
                                                   {"law", Kind::text, "amplitude", "gain law: amplitude | power"}}),
                  cmd_fig2});
  cmds.push_back({"fig3", "Relative OL vs M: Lloyd-Max vs GOQ on quadratic-2d",
                  join(common_fields("out/fig3"), {{"n", Kind::integer, 10000, "training sample size"},
                                                   {"m_min", Kind::integer, 2, "smallest M"},
                                                   {"m_max", Kind::integer, 10, "largest M"},
                                                   {"restarts", Kind::integer, 5, "GOQ multi-starts"},
                                                   {"polish", Kind::boolean, true, "exact-loss refinement"},
                                                   {"holdout_n", Kind::integer, 10000, "held-out sample size"}}),
                  cmd_fig3});
  cmds.push_back({"fig4", "Source density and lambda_max-weighted density on a grid",
                  join(common_fields("out/fig4"), {{"grid", Kind::integer, 41, "grid points per axis"},
                                                   {"hi", Kind::number, 4.0, "grid upper end"}}),
                  cmd_fig4});
  cmds.push_back({"fig6", "Required clusters vs exponent P: goal-oriented vs k-means",
                  join(common_fields("out/fig6"),
                       {{"P", Kind::list, json::array({4, 8, 12, 16, 20}), "exponents"},
                        {"target", Kind::number, 5.0, "relative OL target (%)"},
                        {"m_min", Kind::integer, 1, "smallest M"},
                        {"m_max", Kind::integer, 300, "largest M"},
                        {"demand", Kind::number, 30.0, "energy demand E"},
                        {"dataset", Kind::text, "", "CSV dataset path (rows are profiles)"},
                        {"dataset_params", Kind::object, {{"count", 300}, {"dim", 24}, {"seed", 2024}},
                         "synthetic-load parameters"}}),
                  cmd_fig6});
  return cmds;
}

json build_config(const Command& cmd, const std::string& config_path, const std::map<std::string, std::string>& flags) {
  json cfg = json::object();
  for (const auto& f : cmd.fields) cfg[f.key] = f.def;
  if (!config_path.empty()) {
    const json file = read_json_file(config_path, "--config");
    if (!file.is_object()) throw ConfigError("$: config must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      auto it = std::find_if(cmd.fields.begin(), cmd.fields.end(), [&](const Field& f) { return f.key == key; });
      if (it == cmd.fields.end()) throw ConfigError("$." + key + ": unknown key for '" + cmd.name + "'");
      if (!matches(value, it->kind)) throw ConfigError("$." + key + ": expected " + kind_name(it->kind));
      cfg[key] = value;
    }
  }
  for (const auto& f : cmd.fields)
    if (auto it = flags.find(f.key); it != flags.end()) cfg[f.key] = parse_flag(f, it->second);
  return cfg;
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

}  // namespace

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  const std::vector<Command> cmds = commands();
  CLI::App app{"Goal-oriented quantization toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Configuration: --config FILE loads a JSON object whose keys are the flag names with '_' for '-'.\n"
      "Flags given on the command line override config-file fields; unknown keys are rejected.\n"
      "--threads falls back to GOQ_THREADS, then 1. Exit status: 0 ok, 1 config error, 2 numeric failure.");
  struct Slot {
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<Slot> slots(cmds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    CLI::App* sub = app.add_subcommand(cmds[c].name, cmds[c].help);
    sub->add_option("--config", slots[c].config, "JSON config file");
    for (const auto& f : cmds[c].fields) {
      std::string def = f.def.is_string() ? f.def.get<std::string>() : f.def.dump();
      slots[c].options[f.key] =
          sub->add_option(flag_name(f.key), slots[c].values[f.key], f.help + " [default: " + def + "]");
    }
    subs.push_back(sub);
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    if (!subs[c]->parsed()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::map<std::string, std::string> flags;
      for (const auto& [key, opt] : slots[c].options)
        if (opt->count() > 0) flags[key] = slots[c].values[key];
      const json cfg = build_config(cmds[c], slots[c].config, flags);
      set_default_threads(cfg.at("threads").get<int>());
      Output out(cfg.at("out").get<std::string>(), cmds[c].name, cfg);
      out.seed("seed", seed_of(cfg));
      int status = 0;
      try {
        status = cmds[c].run(cfg, out);
      } catch (...) {
        out.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), -1);
        throw;
      }
      out.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), status);
      return status;
    } catch (const ConfigError& e) {
      std::cerr << "goq " << cmds[c].name << ": config error: " << e.what() << "\n";
      return 1;
    } catch (const NumericError& e) {
      std::cerr << "goq " << cmds[c].name << ": numeric failure: " << e.what() << "\n";
      return 2;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "goq " << cmds[c].name << ": config error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "goq " << cmds[c].name << ": error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}

}  // namespace goq::cli

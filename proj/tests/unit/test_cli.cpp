#include <doctest.h>

#include "cli.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("goq-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

int run(std::vector<std::string> args) { return goq::cli::run(args); }

}  // namespace

TEST_CASE("table1 writes eight rows and a manifest") {
  const fs::path out = scratch("table1");
  REQUIRE(run({"table1", "--out", out.string()}) == 0);
  const std::string csv = slurp(out / "table1.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  const json m = load(out / "manifest.json");
  CHECK(m["command"] == "table1");
  CHECK(m["status"] == 0);
  CHECK(m.contains("seeds"));
  CHECK(m.contains("wall_time_s"));
}

TEST_CASE("solve, evaluate and re-run from the saved config") {
  const fs::path out = scratch("solve");
  REQUIRE(run({"solve", "--goal", "quadratic-2d", "--source", "exp-iid", "--M", "5", "--seed", "1", "--mc-points",
               "2000", "--out", out.string()}) == 0);
  CHECK(fs::exists(out / "quantizer.json"));
  CHECK(fs::exists(out / "trace.csv"));
  const json q = load(out / "quantizer.json");
  CHECK(q["context"]["goal"]["id"] == "quadratic-2d");

  // The echoed config is accepted unchanged and reproduces the artifacts.
  const fs::path again = scratch("solve-again");
  json cfg = load(out / "config.json");
  cfg["out"] = again.string();
  std::ofstream(out / "rerun.json") << cfg.dump();
  REQUIRE(run({"solve", "--config", (out / "rerun.json").string()}) == 0);
  CHECK(slurp(out / "quantizer.json") == slurp(again / "quantizer.json"));
  CHECK(slurp(out / "trace.csv") == slurp(again / "trace.csv"));

  const fs::path e1 = scratch("eval1"), e2 = scratch("eval2");
  for (const auto& dir : {e1, e2})
    REQUIRE(run({"evaluate", "--quantizer", (out / "quantizer.json").string(), "--n", "2000", "--seed", "2", "--out",
                 dir.string()}) == 0);
  CHECK(slurp(e1 / "report.csv") == slurp(e2 / "report.csv"));
  CHECK(slurp(e1 / "report.json") == slurp(e2 / "report.json"));
}

TEST_CASE("flags override config-file fields") {
  const fs::path out = scratch("override");
  fs::create_directories(out);
  std::ofstream(out / "cfg.json") << json{{"M", 3}, {"mc_points", 1000}, {"goal", "scalar-ee"}, {"source", "trunc-exp"},
                                          {"source_params", json::object()}, {"goal_params", json::object()}}
                                         .dump();
  REQUIRE(run({"solve", "--config", (out / "cfg.json").string(), "--M", "4", "--out", (out / "run").string()}) == 0);
  const json cfg = load(out / "run" / "config.json");
  CHECK(cfg["M"] == 4);
  CHECK(cfg["mc_points"] == 1000);
  CHECK(load(out / "run" / "quantizer.json")["representatives"].size() >= 1);
}

TEST_CASE("config errors exit with status 1") {
  const fs::path out = scratch("errors");
  fs::create_directories(out);
  std::ofstream(out / "unknown.json") << R"({"M": 3, "colour": "red"})";
  std::ofstream(out / "badtype.json") << R"({"M": "three"})";
  std::ofstream(out / "broken.json") << R"({"M": )";
  CHECK(run({"solve", "--config", (out / "unknown.json").string(), "--out", (out / "a").string()}) == 1);
  CHECK(run({"solve", "--config", (out / "badtype.json").string(), "--out", (out / "b").string()}) == 1);
  CHECK(run({"solve", "--config", (out / "broken.json").string(), "--out", (out / "c").string()}) == 1);
  CHECK(run({"solve", "--M", "x", "--out", (out / "d").string()}) == 1);
  CHECK(run({"solve", "--goal", "no-such-goal", "--out", (out / "e").string()}) == 1);
  CHECK(run({"evaluate", "--quantizer", (out / "missing.json").string(), "--out", (out / "f").string()}) == 1);
  CHECK(run({"frobnicate"}) == 1);
  CHECK(run({}) == 1);
}

TEST_CASE("density and fig4 artifacts") {
  const fs::path d = scratch("density"), f = scratch("fig4");
  REQUIRE(run({"density", "--goal", "scalar-ee", "--source", "trunc-exp", "--points", "11", "--out", d.string()}) == 0);
  const std::string csv = slurp(d / "density.csv");
  CHECK(csv.rfind("g,phi,value_density,rho_opt\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  REQUIRE(run({"fig4", "--grid", "5", "--out", f.string()}) == 0);
  CHECK(fs::exists(f / "density.csv"));
}

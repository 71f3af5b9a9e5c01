#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsv/app.hpp"
#include "json.hpp"

using namespace fsv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fsval");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

// FN left branch cut down to a few cells.
json small_fhn() {
  json j = json::parse(preset_json("fhn"));
  j["branches"] = json::array({j["branches"][0]});
  j["branches"][0]["Y"] = json::array({json::array({"-0.0002", "0.0018"})});
  j["branches"][0]["subdivisions"] = json::array({20});
  return j;
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("fsval_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const json& j) {
  fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("presets are the shipped configuration files") {
  for (const auto& n : preset_names()) {
    CAPTURE(n);
    CHECK(json::parse(preset_json(n)) == json::parse(slurp(fs::path(FSV_CONFIG_DIR) / (n + ".json"))));
  }
  CHECK(preset_names() == std::vector<std::string>{"cylinder", "fhn", "predprey"});
  CHECK_THROWS_AS(preset("vanderpol"), ConfigError);
}

TEST_CASE("parameters are read as given") {
  auto param = [](const RunConfig& c, const std::string& k) {
    for (const auto& [name, v] : c.system.params)
      if (name == k) return v;
    FAIL("missing parameter " << k);
    return Interval(0);
  };
  RunConfig f = preset("fhn");
  CHECK(param(f, "a").contains(0.3));
  CHECK(param(f, "a").width() <= 1.2e-16);  // two ulps at most
  CHECK(param(f, "gamma") == Interval(10));
  CHECK(param(f, "delta") == Interval(9));
  CHECK(param(f, "c").subset_of(Interval(0.7989, 0.8011)));
  CHECK(Interval(0.799, 0.801).subset_of(param(f, "c")));
  RunConfig p = preset("predprey");
  CHECK(param(p, "a").contains(1.65));
  CHECK(param(p, "b") == Interval(0.25));
  CHECK(param(p, "theta") == Interval(-0.25));
  CHECK(f.eps0 >= 1e-4);
  CHECK(f.eps0 <= std::nextafter(1e-4, 1.0));
}

TEST_CASE("malformed configurations") {
  json j = small_fhn();
  j["eps0"] = "-1e-4";
  CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
  j = small_fhn();
  j["schema"] = 2;
  CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
  j = small_fhn();
  j["system"]["f"][0] = "v + q";
  CHECK_THROWS_AS(FastSlowSystem(parse_config(j.dump()).system), UnknownSymbol);
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  j = small_fhn();
  j["branches"][0]["subdivisions"] = json::array({20, 3});
  CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
}

TEST_CASE("exit codes") {
  fs::path dir = scratch("exit");
  json bad = small_fhn();
  bad["eps0"] = "-1e-4";
  CHECK(cli({"tube", "--config", write_config(dir, bad).string(), "--out", (dir / "o").string()}) == kExitConfig);
  CHECK(cli({"tube", "--preset", "nonesuch"}) == kExitConfig);
  CHECK(cli({"tube"}) == kExitConfig);
  CHECK(cli({"tube", "--preset", "fhn", "--M", "0.5"}) == kExitConfig);
  CHECK(cli({"preset-list"}) == kExitCertified);

  fs::path cfg = write_config(dir, small_fhn());
  CHECK(cli({"tube", "--config", cfg.string(), "--out", (dir / "ok").string()}) == kExitCertified);
  for (const char* f : {"report.json", "cells.csv", "eigenpairs.csv", "smoothness.csv"})
    CHECK(fs::exists(dir / "ok" / f));
  json rep = json::parse(slurp(dir / "ok" / "report.json"));
  CHECK(rep["status"] == "certified");
  CHECK(rep["branches"][0]["cells_total"] == 20);
  CHECK(rep["params"].contains("gamma"));

  // A box past the right fold cannot be certified.
  json fold = json::parse(preset_json("fhn"));
  fold["branches"] = json::array({fold["branches"][1]});
  fold["branches"][0]["Y"] = json::array({json::array({"0.08", "0.09"})});
  fold["branches"][0]["subdivisions"] = json::array({2});
  fold["refine_depth"] = 1;
  CHECK(cli({"tube", "--config", write_config(dir, fold).string(), "--out", (dir / "fold").string()}) ==
        kExitFailed);
  json frep = json::parse(slurp(dir / "fold" / "report.json"));
  CHECK(frep["status"] == "failed");
  CHECK(frep["branches"][0]["cells_failed"].get<int>() > 0);
}

TEST_CASE("reports are deterministic across runs and thread counts") {
  RunConfig cfg = parse_config(small_fhn().dump());
  RunReport a = execute(cfg, "tube");
  RunReport b = execute(cfg, "tube");
  cfg.jobs = 3;
  RunReport c = execute(cfg, "tube");
  const std::string ja = report_json(a, false);
  CHECK(ja == report_json(b, false));
  CHECK(ja == report_json(c, false));
  CHECK(cells_csv(a) == cells_csv(c));
  CHECK(eigenpairs_csv(a) == eigenpairs_csv(c));
  CHECK(json::parse(report_json(a, true)).contains("timings"));
  CHECK_FALSE(json::parse(ja).contains("timings"));
}

TEST_CASE("cells.csv has one row per cell") {
  RunConfig cfg = parse_config(small_fhn().dump());
  RunReport r = execute(cfg, "bundle");
  std::istringstream in(cells_csv(r));
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.find("branch") != std::string::npos);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 20);
  CHECK(exit_code(r) == kExitCertified);
}

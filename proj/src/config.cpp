#include "fsv/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fsv {

using nlohmann::json;

namespace {

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Numbers and decimal strings become enclosures of the written value;
// [lo, hi] pairs become the hull of the enclosures of both ends.
Interval interval_value(const json& v, const std::string& what) {
  try {
    if (v.is_number()) return decimal_enclosure(shortest(v.get<double>()));
    if (v.is_string()) return decimal_enclosure(v.get<std::string>());
    if (v.is_array() && v.size() == 2) {
      Interval lo = interval_value(v[0], what), hi = interval_value(v[1], what);
      if (lo.lo() > hi.hi()) throw ConfigError(what + ": lower end exceeds upper end");
      return Interval(lo.lo(), hi.hi());
    }
  } catch (const ParseError&) {
  }
  throw ConfigError(what + ": expected a number, a decimal string or a [lo, hi] pair");
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

std::vector<std::string> strings(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ConfigError(std::string("system.") + key + " must be a list");
  std::vector<std::string> out;
  for (const auto& s : j[key]) {
    if (!s.is_string()) throw ConfigError(std::string("system.") + key + " entries must be strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

Vec vec(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be a list of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " must be a list of numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

BranchSpec branch(const json& b, const RunConfig& cfg) {
  BranchSpec s;
  s.name = b.value("name", "branch");
  if (!b.contains("x0")) throw ConfigError("branch " + s.name + ": x0 missing");
  s.x0 = vec(b["x0"], "branch " + s.name + ": x0");
  if (!b.contains("Y") || !b["Y"].is_array()) throw ConfigError("branch " + s.name + ": Y must be a list of pairs");
  std::vector<Interval> Y;
  for (const auto& y : b["Y"]) Y.push_back(interval_value(y, "branch " + s.name + ": Y"));
  s.Y = IVector(Y);
  if (!b.contains("subdivisions") || !b["subdivisions"].is_array())
    throw ConfigError("branch " + s.name + ": subdivisions must be a list");
  for (const auto& n : b["subdivisions"]) {
    if (!n.is_number_integer() || n.get<long>() < 1) throw ConfigError("branch " + s.name + ": subdivisions must be >= 1");
    s.subdivisions.push_back(n.get<int>());
  }
  if (s.Y.size() != cfg.system.slow.size() || s.subdivisions.size() != s.Y.size())
    throw ConfigError("branch " + s.name + ": Y and subdivisions must have one entry per slow variable");
  if (static_cast<std::size_t>(s.x0.size()) != cfg.system.fast.size())
    throw ConfigError("branch " + s.name + ": x0 must have one entry per fast variable");
  s.eta_u = number(b, "eta_u", 0.0);
  s.eta_s = number(b, "eta_s", 0.0);
  s.M_u = number(b, "M_u", cfg.M);
  s.M_s = number(b, "M_s", cfg.M);
  s.l_u = number(b, "l_u", 0.0);
  s.l_s = number(b, "l_s", 0.0);
  if (s.eta_u < 0 || s.eta_s < 0 || s.l_u < 0 || s.l_s < 0)
    throw ConfigError("branch " + s.name + ": radii and lengths must be non-negative");
  if (!(s.M_u > 1.0) || !(s.M_s > 1.0)) throw ConfigError("branch " + s.name + ": cone slopes must exceed 1");
  return s;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  if (j.value("schema", kConfigSchema) != kConfigSchema)
    throw ConfigError("unsupported schema version (expected " + std::to_string(kConfigSchema) + ")");

  RunConfig cfg;
  cfg.name = j.value("name", "custom");
  if (!j.contains("system") || !j["system"].is_object()) throw ConfigError("system section missing");
  const json& s = j["system"];
  cfg.system.fast = strings(s, "fast");
  cfg.system.slow = strings(s, "slow");
  cfg.system.f = strings(s, "f");
  cfg.system.g = strings(s, "g");
  cfg.system.eps = s.value("eps", "eps");
  if (s.contains("params")) {
    if (!s["params"].is_object()) throw ConfigError("system.params must be an object");
    for (const auto& [k, v] : s["params"].items()) cfg.system.params.emplace_back(k, interval_value(v, "parameter " + k));
  }
  if (cfg.system.f.size() != cfg.system.fast.size() || cfg.system.g.size() != cfg.system.slow.size())
    throw ConfigError("number of equations must match the number of variables");

  if (!j.contains("eps0")) throw ConfigError("eps0 missing");
  Interval eps0 = interval_value(j["eps0"], "eps0");
  if (eps0.lo() < 0.0) throw ConfigError("eps0 must be non-negative");
  cfg.eps0 = eps0.hi();
  cfg.M = number(j, "M", 10.0);
  if (!(cfg.M > 1.0)) throw ConfigError("M must exceed 1");
  cfg.jobs = static_cast<int>(number(j, "jobs", 1));
  cfg.refine_depth = static_cast<int>(number(j, "refine_depth", 6));
  if (cfg.jobs < 1 || cfg.refine_depth < 0) throw ConfigError("jobs must be >= 1 and refine_depth >= 0");
  cfg.smoothness = j.value("smoothness", false);

  if (!j.contains("branches") || !j["branches"].is_array() || j["branches"].empty())
    throw ConfigError("at least one branch is required");
  for (const auto& b : j["branches"]) cfg.branches.push_back(branch(b, cfg));

  if (j.contains("samples")) {
    const json& sm = j["samples"];
    cfg.samples.half_width = number(sm, "half_width", cfg.samples.half_width);
    if (sm.contains("points"))
      for (const auto& p : sm["points"]) {
        Vec v = vec(p, "samples.points");
        if (static_cast<std::size_t>(v.size()) != cfg.system.slow.size())
          throw ConfigError("sample points need one coordinate per slow variable");
        cfg.samples.points.push_back(v);
      }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace fsv

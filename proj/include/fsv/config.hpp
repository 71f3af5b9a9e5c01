#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fsv/tubular.hpp"

namespace fsv {

struct SampleSpec {
  std::vector<Vec> points;
  double half_width = 2e-4;
};

struct RunConfig {
  std::string name;
  SystemSpec system;
  double eps0 = 0.0;  // upper end of the eps range, already rounded up
  double M = 10.0;
  int jobs = 1;
  int refine_depth = 6;
  bool smoothness = false;
  std::vector<BranchSpec> branches;
  SampleSpec samples;
};

constexpr int kConfigSchema = 1;

// Throws ConfigError on malformed or inconsistent input.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
// JSON text of a built-in configuration; throws ConfigError for unknown names.
std::string preset_json(const std::string& name);
RunConfig preset(const std::string& name);

}  // namespace fsv

#include "fsv/config.hpp"
#include "presets_data.hpp"

namespace fsv {

std::vector<std::string> preset_names() { return {"cylinder", "fhn", "predprey"}; }

std::string preset_json(const std::string& name) {
  if (name == "cylinder") return preset_data::cylinder;
  if (name == "fhn") return preset_data::fhn;
  if (name == "predprey") return preset_data::predprey;
  throw ConfigError("unknown preset '" + name + "'");
}

RunConfig preset(const std::string& name) { return parse_config(preset_json(name)); }

}  // namespace fsv

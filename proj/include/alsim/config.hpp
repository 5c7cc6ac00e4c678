#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "alsim/loop.hpp"

namespace alsim {

// Flat `key = value` experiment settings; `#` starts a comment. Later flags
// from the command line are merged on top before building the config.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap load_config_file(const std::filesystem::path& path);

// Comma-separated unsigned seeds, e.g. "1,2,3". Empty items are rejected.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// Builds a validated-shape config from string settings. Unknown keys and
// malformed values are ConfigErrors; range checks happen later in
// ExperimentConfig::validate.
ExperimentConfig make_experiment_config(const ConfigMap& values);

}  // namespace alsim

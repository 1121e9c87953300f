#pragma once

#include <filesystem>

#include "spdc/config.hpp"

namespace spdc::test {

inline std::filesystem::path config_path(const char* name = "paper_6mm.cfg") {
  return std::filesystem::path(SPDC_CONFIG_DIR) / name;
}

inline const SourceConfig& default_config() {
  static const SourceConfig config = load_config(config_path());
  return config;
}

inline SourceModel default_model() { return build_source_model(default_config()); }

}  // namespace spdc::test

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "hyper/declarative.hpp"
#include "hyper/procedural.hpp"
#include "hyper/recommend.hpp"
#include "hyper/rulemine.hpp"

namespace hyper {

/**
 * @brief Every tunable of the engine, loaded from an INI-style text file.
 *
 * The file holds `[section]` headers and `key = value` lines; `#` and `;`
 * start comments. Unknown sections or keys are rejected. Omitted keys keep
 * their defaults.
 */
struct EngineConfig {
  ActivationParams activation;
  int cooc_window = 5;
  MiningConfig mining;
  BoostParams boost;
  ScopeWeights weights;
  ScopeMode scope_mode = ScopeMode::kWeighted;
  int exclude_recent = 0;
  BucketSpec bucket;
  std::uint64_t seed = 42;

  EngineParams engine_params() const;
  /// Throws Error(kInvalidConfig).
  void Validate() const;
  bool operator==(const EngineConfig&) const = default;
};

EngineConfig ParseConfig(const std::string& text);
EngineConfig LoadConfig(const std::filesystem::path& path);
std::string SerializeConfig(const EngineConfig& config);

/// section -> key -> value, exactly as SerializeConfig writes them.
std::map<std::string, std::map<std::string, std::string>> ConfigEntries(
    const EngineConfig& config);

}  // namespace hyper

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "nspregen/physics.hpp"
#include "nspregen/planner.hpp"

namespace nspregen::config {

inline constexpr int kConfigVersion = 1;

struct RunConfig {
    int version = kConfigVersion;
    std::uint64_t seed = 0;
    std::string out = "out";
    int workers = 0;  ///< 0 picks default_workers()
    physics::FlowKind kind = physics::FlowKind::FPO;
    int per_cell_n = 30;
    planner::GenerationSettings generation;
    planner::TierCatalog catalog;

    int resolved_workers() const;
};

/// `key = value` lines, `#` comments. `version` is required; unknown or
/// repeated keys and invalid values raise ConfigError naming the key.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its current value, in a form parse_config accepts.
std::string dump_config(const RunConfig& c);

/// Throws ConfigError when a value is out of range.
void validate(const RunConfig& c);

}  // namespace nspregen::config

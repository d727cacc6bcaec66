#pragma once

#include <cstdint>
#include <string>

#include "sdp/harness.hpp"

namespace sdp::config {

/// Reads an INI file (`[section]` headers, `key = value` lines, `#`/`;`
/// comments). Missing keys keep their defaults; unknown keys are rejected.
/// Throws ConfigError.
harness::ExperimentConfig load(const std::string& path);
harness::ExperimentConfig parse(const std::string& text);

/// Canonical INI text of every setting, numbers with 17 significant digits.
std::string to_ini(const harness::ExperimentConfig& cfg);

/// FNV-1a hash of to_ini(cfg).
std::uint64_t hash(const harness::ExperimentConfig& cfg);

}  // namespace sdp::config

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "perco/harness.hpp"

namespace perco {

// Raised for malformed or invalid configuration; the CLI maps it to exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for numerical failures (e.g. an inconsistent root search); exit 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Loads the key-value experiment format (TOML-style [graph] / [init] /
// [rule] / [ensemble] / [sweep] sections, '#' comments). Validation errors
// name the offending key. Defaults: rule = majority, spread_epsilon = 0.1,
// almost_fraction = 0.99, runs = 1, base_seed = 1.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Canonical "key=value\n" rendering of a config; the FNV-1a 64 hash of this
// string is embedded in every JSON summary and must survive a round trip.
std::string canonical_config_string(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Re-reads the "config" object of an emitted JSON summary and returns the
// recomputed hash (throws ConfigError on malformed input).
std::uint64_t rehash_summary_json(const std::string& json_text);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace perco

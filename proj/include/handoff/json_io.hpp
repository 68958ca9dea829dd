#pragma once

#include <string>
#include <vector>

#include "handoff/core.hpp"

namespace handoff {

struct IngestWarning {
    int hypothesis_id = 0;
    std::string message;
};

struct PoolParseResult {
    HypothesisPool pool;
    std::vector<IngestWarning> warnings;
};

/// Parses and validates pool JSON. Boxes are clamped to [0,1]; swapped
/// corners are repaired with a warning record.
PoolParseResult parse_pool(const std::string& raw);
GroundTruthPage parse_ground_truth(const std::string& raw);
ParserInterface parse_interface(const std::string& raw);

/// Canonical serialization: fixed key order, deterministic float rendering.
/// Pool and ground-truth floats use shortest round-trip form; interface
/// floats are rendered with 6 decimal places.
std::string serialize_pool(const HypothesisPool& pool);
std::string serialize_ground_truth(const GroundTruthPage& gt);
std::string serialize_interface(const ParserInterface& iface);

/// Reads a config file (JSON) into HandoffConfig; unknown keys rejected.
HandoffConfig parse_config(const std::string& raw);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace handoff

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "nrpb/runner.hpp"

namespace nrpb {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON document; InvalidConfig on I/O or syntax errors.
Json load_json(const std::filesystem::path& path);

/// Point configuration. Missing keys keep the reference working point.
/// Unknown keys are rejected.
PointConfig parse_point_config(const Json& doc);

/// Sweep specification: the point keys plus "axes", "directions",
/// "outputs" and "max_points".
SweepSpec parse_sweep_spec(const Json& doc);

/// Applies a per-mode truncation override to all three modes.
void override_dims(PointConfig& config, int dim);

Json to_json(const SystemParams& params);
Json to_json(const PointConfig& config);
Json to_json(const SweepSpec& spec);

} // namespace nrpb

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ease/task.hpp"

namespace ease {

/// Parses the documented JSON config shape. Strict: unknown keys anywhere in
/// the document are rejected with the offending key named. Throws ParseError.
TaskConfig parse_config(const nlohmann::json& doc);

/// Inverse of parse_config; emits every field explicitly so the round-trip
/// parse(serialize(c)) == c holds.
nlohmann::ordered_json serialize_config(const TaskConfig& config);

/// Reads, parses, and validates a config file. Parse errors and validation
/// violations name the file; throws ParseError / ConfigError / IoError.
TaskConfig load_config(const std::filesystem::path& path);

}  // namespace ease

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace maxlab {

/// 12 significant digits.
std::string fmt_double(double v);

/// Copy of j with every float rounded to 12 significant digits, so dumps
/// are stable across platforms.
nlohmann::json round_floats(const nlohmann::json& j);

/// round_floats + 2-space indented dump + trailing newline.
std::string dump_json(const nlohmann::json& j);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

void write_file(const std::filesystem::path& path, const std::string& content);

/// Version string embedded in reports.
const char* tool_version();

}  // namespace maxlab

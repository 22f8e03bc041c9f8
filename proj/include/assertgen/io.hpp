// File and JSON helpers. Every artifact goes through these so that output is
// LF-terminated with sorted object keys.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace assertgen {

using Json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);

/// Canonical two-space-indented dump with a trailing newline.
std::string dump_json(const Json& value);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

std::string trim(std::string_view s);

} // namespace assertgen

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace skillroute {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Reads and parses a JSON file; I/O and syntax problems surface as validation errors.
Json read_json_file(const std::filesystem::path& path);

/// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& doc);

void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// Returns doc[key] when doc is an object wrapper, or doc itself when it is a bare array.
const Json& unwrap_array(const Json& doc, std::string_view key, std::string_view what);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace skillroute

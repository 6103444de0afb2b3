#pragma once

// Deterministic text output: fixed 17-significant-digit floats, JSON
// documents with insertion-ordered keys and CSV helpers.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace curvedq {

/// "%.17g"; non-finite values become "nan", "inf" or "-inf".
std::string format_double(double x);

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

using Json = nlohmann::ordered_json;

/// Two-space indented text with a trailing newline. Non-finite numbers become null.
std::string json_text(const Json& j);

/// Writes `contents` to `path`, creating parent directories. Throws TaskError on I/O failure.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace curvedq

#pragma once

#include <string>
#include <string_view>

namespace edgegov::io {

/// Writes `content` to a sibling temp file and renames it over `path`.
/// On failure nothing is left at `path` and IoError is thrown.
void write_atomic(const std::string& path, std::string_view content);

/// Shortest-roundtrip-safe decimal rendering with 17 significant digits.
std::string format_double(double v);

std::string read_file(const std::string& path);

}  // namespace edgegov::io

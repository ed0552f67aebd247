#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scsl::io {

/// Reads the whole file; throws IoError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Splits file contents into lines (LF or CRLF). A trailing newline does not
/// produce an empty final line.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t value);

std::string file_checksum(const std::filesystem::path& path);

/// Minimal RFC 4180 field splitting for one CSV line.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace scsl::io

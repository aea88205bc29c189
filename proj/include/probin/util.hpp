// File and string plumbing: atomic writes, content checksums, shortest
// round-trip number formatting, and strict numeric parsing.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace probin {

std::string read_text_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" then renames, so readers never observe a torn file.
void atomic_write_text(const std::filesystem::path& path, std::string_view content);

// FNV-1a 64-bit over the file bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// Strict parsers; `context` names the offending field in the error message.
double parse_double(std::string_view text, std::string_view context);
long long parse_int(std::string_view text, std::string_view context);

// Splits on a single delimiter, keeping empty fields.
std::vector<std::string> split(std::string_view text, char delim);

// Splits a comma-separated list, trimming ASCII whitespace around items and
// dropping empty entries.
std::vector<std::string> split_list(std::string_view text);

}  // namespace probin

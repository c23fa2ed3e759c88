#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aiodc::text {

// Lowercase (ASCII), trim, and collapse runs of whitespace to one space.
std::string normalize_label(std::string_view raw);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_whitespace(std::string_view s);

// Tab-separated field escaping: backslash, tab, newline, carriage return.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

// Reads a whole file; throws FileMissing / IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::vector<std::string> lines(std::string_view contents);

}  // namespace aiodc::text

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hgcf::detail {

// Shortest representation that parses back to the identical double.
std::string format_double(double value);

double parse_double(std::string_view text, const std::string& context);
long long parse_integer(std::string_view text, const std::string& context);

std::vector<std::string_view> split_whitespace(std::string_view line);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash = 0xcbf29ce484222325ULL);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// "key=value" lines; blank lines and '#' comments are skipped.
std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source);
std::string format_key_values(const std::map<std::string, std::string>& values);

const std::string& require_key(const std::map<std::string, std::string>& values, const std::string& key,
                               const std::string& source);

}  // namespace hgcf::detail

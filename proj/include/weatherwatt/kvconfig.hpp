#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ww {

/// Plain-text `key = value` files: one pair per line, `#` starts a
/// comment, blank lines ignored. Order of appearance is preserved.
using KvPairs = std::vector<std::pair<std::string, std::string>>;

KvPairs parse_kv_text(const std::string& text, const std::string& origin = "config");
KvPairs parse_kv_file(const std::filesystem::path& path);

/// Numeric conversions with a ConfigError that names the key on failure.
double kv_to_double(const std::string& key, const std::string& value);
long long kv_to_int(const std::string& key, const std::string& value);

/// Splits a comma-separated list, trimming whitespace, dropping empties.
std::vector<std::string> split_csv_list(const std::string& value);

} // namespace ww

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace ada {

/// Shortest round-trip decimal form of a double (to_chars); deterministic
/// across runs, used for every numeric value the artifact writes.
std::string fmt_double(double v);
std::string fmt_int(std::int64_t v);

bool parse_double(std::string_view s, double& out);
bool parse_int64(std::string_view s, std::int64_t& out);
bool parse_uint64(std::string_view s, std::uint64_t& out);
bool parse_bool(std::string_view s, bool& out);

std::string_view trim(std::string_view s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ada

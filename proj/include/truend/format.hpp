#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace truend {

// Currency with exactly two decimals ("6028.16", "-12.50"). All monetary
// CSV output goes through this so files are byte-stable across runs.
std::string format_currency(double value);

// Shortest representation that round-trips a double ("0.00065", "300").
std::string format_double(double value);

std::string format_int(long long value);

// Parse a decimal currency literal with at most two fraction digits into an
// exact double (integer cents / 100). Returns false on malformed input.
bool parse_currency(std::string_view text, double& out);

bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

// FNV-1a 64-bit digest; used for output manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t value);

}  // namespace truend

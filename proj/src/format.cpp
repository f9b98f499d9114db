#include "truend/format.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace truend {

std::string format_currency(double value) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof(buf), "%.2f", value);
    if (n < 0 || n >= static_cast<int>(sizeof(buf)))
        throw std::runtime_error("currency value out of range");
    // avoid the negative-zero artefact from rounding tiny negatives
    if (buf[0] == '-' && std::strtod(buf, nullptr) == 0.0)
        return std::string(buf + 1, static_cast<std::size_t>(n - 1));
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc())
        throw std::runtime_error("failed to format double");
    return std::string(buf, res.ptr);
}

std::string format_int(long long value) {
    return std::to_string(value);
}

bool parse_currency(std::string_view text, double& out) {
    if (text.empty()) return false;
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    if (i >= text.size()) return false;

    long long units = 0;
    std::size_t digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        if (units > (INT64_MAX - 9) / 10) return false;
        units = units * 10 + (text[i] - '0');
        ++i;
        ++digits;
    }
    if (digits == 0) return false;

    long long cents = 0;
    if (i < text.size()) {
        if (text[i] != '.') return false;
        ++i;
        std::size_t frac = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            cents = cents * 10 + (text[i] - '0');
            ++i;
            ++frac;
        }
        if (frac == 0 || frac > 2) return false;  // at most two decimals
        if (frac == 1) cents *= 10;
        if (i != text.size()) return false;
    }
    if (i != text.size()) return false;

    long long total = units * 100 + cents;
    out = static_cast<double>(negative ? -total : total) / 100.0;
    return true;
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

bool parse_int(std::string_view text, long long& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for digest: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(value));
    return std::string(buf);
}

}  // namespace truend

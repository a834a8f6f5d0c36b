/**
 * @file textio.hpp
 * @brief Locale-independent number formatting and atomic file IO helpers.
 */

#pragma once

#include <charconv>
#include <cstdio>
#include <string>

#include "errors.hpp"

namespace exotorq {

/// 17 significant digits: enough for a bit-exact double round-trip.
inline std::string fmt_g17(double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

/// Fixed two decimals, used for report table cells.
inline std::string fmt_f2(double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

/// Strict double parse of a whole token; returns false on trailing garbage.
inline bool parse_double(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    if (begin == end) return false;
    const auto result = std::from_chars(begin, end, out);
    return result.ec == std::errc() && result.ptr == end;
}

std::string read_text_file(const std::string& path);

/// Writes via a temp file in the same directory followed by a rename, so
/// partially written outputs are never observed.
void write_text_file_atomic(const std::string& path, const std::string& content);

/// CRC-32 (zlib polynomial) of a byte buffer.
unsigned long crc32_of(const void* data, std::size_t size);

/// Lower-case zero-padded 8-digit hex of a CRC-32 value.
std::string crc32_hex(unsigned long crc);

} // namespace exotorq

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace smm {

inline constexpr std::string_view kToolVersion = "1.0.0";

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// IEEE-754 bit pattern as "0x" + 16 lowercase hex digits.
std::string double_to_hex(double v);
double hex_to_double(std::string_view s);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hash_hex(std::string_view bytes);

}  // namespace smm

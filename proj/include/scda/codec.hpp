#pragma once

// Two-stage per-element codec: an 8-byte big-endian size, the byte 'z' and
// a zlib stream, then base64 in 76-character lines with a 2-byte break after
// every line.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "scda/wire.hpp"

namespace scda {

inline constexpr int kStoredLevel = 0;
inline constexpr int kDefaultLevel = -1;
inline constexpr int kBestLevel = 9;

inline constexpr std::size_t kArmorLineBytes = 76;
inline constexpr std::size_t kArmorBreakBytes = 2;
inline constexpr char kCompressionMarker = 'z';
inline constexpr std::size_t kSizePrefixBytes = 8;

struct CompressedElement {
  std::string armored;
  std::uint64_t uncompressed_size = 0;
};

/// Level 0 emits stored blocks without touching zlib; any other level uses
/// zlib when the build has it and falls back to stored blocks otherwise.
CompressedElement compress_element(std::string_view data, LineStyle style, int level = kBestLevel);

/// Inverse of compress_element.  The break bytes after each line are
/// skipped by position and may hold anything.  Throws DecodeError with code
/// bad_base64, missing_z_marker, inflate_failed, checksum_mismatch or
/// size_mismatch.
std::string decompress_element(std::string_view armored);

/// Reads only the 8-byte size prefix of an armored element.
std::uint64_t peek_uncompressed_size(std::string_view armored);

std::string base64_encode(std::string_view data);
std::optional<std::string> base64_decode(std::string_view code);

/// Base64 of the stage-1 bytes in lines of 76, each followed by the style's
/// break bytes, and the inverse.
std::string armor(std::string_view stage1, LineStyle style);
std::string dearmor(std::string_view armored);

/// Break bytes written after each armored line.
std::string_view armor_break(LineStyle style);

}  // namespace scda

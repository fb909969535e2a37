#pragma once

// RFC 1950 stream helpers behind the element codec.  zlib does the real
// compression when available; stored blocks (level 0) are produced and
// inflated in-house so the codec works without a backend.

#include <cstdint>
#include <string>
#include <string_view>

namespace scda::detail {

std::uint32_t adler32(std::string_view data, std::uint32_t start = 1);

/// zlib stream made of stored blocks only.
std::string zlib_stored(std::string_view data);

/// zlib stream at `level` (0..9, or -1 for the library default).
std::string zlib_compress(std::string_view data, int level);

/// Inflates a complete zlib stream.  Stops with a size_mismatch DecodeError
/// as soon as the output would exceed `expected`; reports checksum and
/// stream errors distinctly.
std::string zlib_inflate(std::string_view stream, std::uint64_t expected);

/// Stored-block-only inflater used when zlib is unavailable.
std::string zlib_inflate_stored(std::string_view stream, std::uint64_t expected);

bool have_zlib();

}  // namespace scda::detail

#pragma once

// Full-file conformance scan with byte-accurate violation reports.

#include <cstdint>
#include <optional>
#include <string>

#include "scda/error.hpp"
#include "scda/sections.hpp"
#include "scda/wire.hpp"

namespace scda {

struct Violation {
  std::uint64_t offset = 0;   // first byte of the offending entry
  Errc code = Errc::ok;
  std::string reason;
};

struct ValidationReport {
  std::optional<Violation> violation;
  std::size_t sections = 0;          // raw sections scanned before any violation
  std::optional<LineStyle> style;    // strict mode: the style shared by all entries

  bool valid() const { return !violation; }
};

/// Lenient mode accepts everything a reader accepts: padding break bytes are
/// not inspected.  Strict mode also requires every fixed and data padding
/// to follow one line style, and every compression wrapper to conform and
/// decode.  I/O errors from `source` propagate as IoError.
ValidationReport validate(const ByteSource& source, bool strict);

}  // namespace scda

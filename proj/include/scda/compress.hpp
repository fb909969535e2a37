#pragma once

// Optional compression convention: a logical block or array is stored as a
// metadata section whose user string is a magic, followed by a raw data
// section carrying per-element compressed bytes.
//
//   block           I("B compressed scda 00", U entry) + B(user, element)
//   fixed array     I("A compressed scda 00", U entry) + V(user, elements)
//   variable array  A("V compressed scda 00", N, 32, U entries) + V(user, elements)

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scda/codec.hpp"
#include "scda/sections.hpp"

namespace scda {

/// Letter of the count entries holding uncompressed sizes.
inline constexpr char kUncompressedLetter = 'U';
inline constexpr std::string_view kCompressionVersion = "00";

/// "<kind> compressed scda 00" for kind in {B, A, V}.
std::string compression_magic(SectionKind wrapped);

/// Wrapped kind if `first_kind` and `user` open a compressed pair.
std::optional<SectionKind> detect_compression(SectionKind first_kind, std::string_view user);

struct CompressedPair {
  Section meta;
  Section data;
};

CompressedPair wrap_compressed_block(std::string_view user, std::string_view data, LineStyle style,
                                     int level = kBestLevel);
CompressedPair wrap_compressed_array_fixed(std::string_view user, Count n, Count e,
                                           std::string_view payload, LineStyle style,
                                           int level = kBestLevel);
CompressedPair wrap_compressed_array_var(std::string_view user, std::span<const Count> sizes,
                                         std::string_view payload, LineStyle style,
                                         int level = kBestLevel);

/// Decodes a pair back into the logical section.  Throws FormatError
/// (nonconforming_wrapper) if `meta` opens a pair that `data` or the
/// metadata payload does not complete, and DecodeError for bad elements.
Section unwrap_compressed(const Section& meta, const Section& data);

/// Throws FormatError (nonconforming_wrapper) unless the records form a
/// conforming pair for `wrapped`.  Only metadata is inspected.
void check_pair_layout(SectionKind wrapped, const SectionRecord& meta, const SectionRecord& data);

/// One entry of a file listing, with compressed pairs folded together when
/// decoding.
struct LogicalSection {
  SectionKind kind = SectionKind::inline_data;
  std::string user;
  Count count = 0;
  Count size = 0;              // E, or U for compressed blocks and fixed arrays
  std::vector<Count> sizes;    // element sizes of variable arrays (uncompressed when decoded)
  bool compressed = false;
  std::size_t first_raw = 0;   // index into FileIndex::sections
  std::size_t raw_count = 1;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

std::vector<LogicalSection> logical_sections(const ByteSource& source, const FileIndex& index,
                                             bool decode);

/// Payload of a logical section, decompressed if it is a compressed pair.
std::string logical_payload(const ByteSource& source, const FileIndex& index,
                            const LogicalSection& section);

}  // namespace scda

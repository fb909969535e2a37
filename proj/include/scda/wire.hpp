#pragma once

// Padding disciplines and fixed-width entries from which every section is
// composed.  All functions are pure.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "scda/count.hpp"

namespace scda {

/// Line break dialect chosen when writing.  Has no effect on reading.
enum class LineStyle { Unix, Mime };

inline constexpr std::size_t kDataDivisor = 32;
inline constexpr std::size_t kMinDataPad = 7;
inline constexpr std::size_t kMaxDataPad = kDataDivisor + 6;

inline constexpr std::size_t kMagicBytes = 8;
inline constexpr std::size_t kVendorEntryBytes = 24;
inline constexpr std::size_t kCountEntryBytes = 32;
inline constexpr std::size_t kSectionHeaderBytes = 64;
inline constexpr std::size_t kInlineDataBytes = 32;
inline constexpr std::size_t kMaxVendorBytes = kVendorEntryBytes - 4;
inline constexpr std::size_t kMaxUserBytes = kSectionHeaderBytes - 2 - 4;

/// Right-pads `data` to `width` bytes: a space, dashes, and the two break
/// bytes of `style`.  Throws LengthError unless data.size() <= width - 4.
std::string pad_fixed(std::string_view data, std::size_t width, LineStyle style);

/// Inverse of pad_fixed.  The final two bytes are not inspected.  Returns a
/// view into `padded`.  Throws FormatError on malformed padding.
std::string_view unpad_fixed(std::string_view padded);

/// Style whose break bytes end `padded`, if any.
std::optional<LineStyle> fixed_pad_style(std::string_view padded);

/// Number of '=' padding bytes after n data bytes: the unique value in
/// [7, 38] making the total divisible by 32.
std::size_t data_pad_length(Count n);

/// Data padding for `n` payload bytes whose last byte is `last` (nullopt for
/// an empty payload).
std::string pad_data(Count n, std::optional<char> last, LineStyle style);
std::string pad_data(std::string_view data, LineStyle style);

/// Style that would produce exactly `padding` for a payload ending as given.
std::optional<LineStyle> data_pad_style(std::string_view padding, Count n,
                                        std::optional<char> last);

/// 32-byte count entry: letter, space, decimal numeral, fixed padding.
std::string encode_count(char letter, Count value, LineStyle style);

/// Throws FormatError (bad_count_entry) on any deviation from the entry
/// layout.
Count decode_count(std::string_view entry, char expected_letter);

/// Letters used in count entries.
inline constexpr char kElementCountLetter = 'N';
inline constexpr char kByteSizeLetter = 'E';

struct SectionHeader {
  char type = 0;
  std::string user;

  bool operator==(const SectionHeader&) const = default;
};

bool is_section_letter(char c);

/// 64-byte entry: section letter, space, user string padded to 62 bytes.
std::string encode_section_header(char type, std::string_view user, LineStyle style);

SectionHeader decode_section_header(std::string_view entry);

}  // namespace scda

#pragma once

// Serial encoders and decoders for the file header and the four data
// section types, and a forward parser that indexes a whole file.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scda/count.hpp"
#include "scda/wire.hpp"

namespace scda {

inline constexpr int kFormatVersion = 0xa0;
inline constexpr int kMaxFormatVersion = 0xff;
inline constexpr std::size_t kFileHeaderBytes = 128;
inline constexpr std::size_t kInlineSectionBytes = kSectionHeaderBytes + kInlineDataBytes;

/// Byte following the 7 printable magic characters.
inline constexpr char kMagicTerminator = ' ';

enum class SectionKind : char {
  inline_data = 'I',
  block = 'B',
  array = 'A',
  varray = 'V',
};

inline char letter(SectionKind k) { return static_cast<char>(k); }

struct FileHeader {
  int version = kFormatVersion;
  std::string vendor;
  std::string user;

  bool operator==(const FileHeader&) const = default;
};

/// "sc" + hex(0xda) + "t" + hex(version) + terminator, 8 bytes.
std::string magic(int version);

/// Version encoded in the first 8 bytes.  Throws FormatError (bad_magic).
int decode_magic(std::string_view bytes);
bool starts_with_magic(std::string_view bytes);

std::string encode_file_header(const FileHeader& header, LineStyle style);
FileHeader decode_file_header(std::string_view bytes);

/// A section held in memory: its metadata and its concatenated payload.
struct Section {
  SectionKind kind = SectionKind::inline_data;
  std::string user;
  Count count = 0;            // N, for arrays
  Count size = 0;             // E: block size or fixed element size
  std::vector<Count> sizes;   // E_i, variable arrays only
  std::string payload;

  static Section inline_data(std::string user, std::string payload);
  static Section block(std::string user, std::string payload);
  static Section array(std::string user, Count n, Count e, std::string payload);
  static Section varray(std::string user, std::vector<Count> sizes, std::string payload);

  bool operator==(const Section&) const = default;
};

std::string encode_inline(std::string_view user, std::string_view payload, LineStyle style);
std::string encode_block(std::string_view user, std::string_view payload, LineStyle style);
std::string encode_array_fixed(std::string_view user, Count n, Count e, std::string_view payload,
                               LineStyle style);
std::string encode_array_var(std::string_view user, std::span<const Count> sizes,
                             std::string_view payload, LineStyle style);
std::string encode_section(const Section& section, LineStyle style);

/// Closed-form encoded length of a section; `payload_bytes` is E for
/// blocks, N*E for fixed arrays and the sum of E_i for variable arrays.
Count encoded_length(SectionKind kind, Count n, Count payload_bytes);

/// Random-access read interface over a complete file image.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::uint64_t size() const = 0;
  /// Fills `out` from `offset`.  Throws if the range is not available.
  virtual void read_at(std::uint64_t offset, std::span<char> out) const = 0;

  std::string read(std::uint64_t offset, std::size_t length) const;
};

class StringSource final : public ByteSource {
 public:
  explicit StringSource(std::string_view bytes) : bytes_(bytes) {}
  std::uint64_t size() const override { return bytes_.size(); }
  void read_at(std::uint64_t offset, std::span<char> out) const override;

 private:
  std::string_view bytes_;
};

/// Metadata of a section located in a file.  Offsets are absolute.
struct SectionRecord {
  SectionKind kind = SectionKind::inline_data;
  std::string user;
  Count count = 0;
  Count size = 0;
  std::vector<Count> sizes;
  std::uint64_t offset = 0;          // first byte of the section header
  std::uint64_t sizes_offset = 0;    // first E_i entry (variable arrays)
  std::uint64_t payload_offset = 0;
  std::uint64_t payload_length = 0;
  std::uint64_t end = 0;             // one past the data padding

  std::uint64_t length() const { return end - offset; }
};

/// Parses a section header and its leading count entries.  For a variable
/// array the size table is only checked to lie within the file; its
/// payload_length and end are left 0.
SectionRecord parse_section_head(const ByteSource& source, std::uint64_t offset);

/// Parses the section starting at `offset`, including a variable array's
/// size table.  Payload bytes are not read.  Throws FormatError.
SectionRecord parse_next_section(const ByteSource& source, std::uint64_t offset);

struct FileIndex {
  FileHeader header;
  std::vector<SectionRecord> sections;
};

/// Full forward scan.  Throws FormatError on any violation, including bytes
/// after the last section.
FileIndex index_file(const ByteSource& source);

std::string read_payload(const ByteSource& source, const SectionRecord& record);
Section load_section(const ByteSource& source, const SectionRecord& record);

}  // namespace scda

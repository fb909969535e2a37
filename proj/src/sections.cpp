#include "scda/sections.hpp"

#include <cstdio>
#include <cstring>
#include <numeric>

#include "scda/error.hpp"

namespace scda {
namespace {

constexpr std::string_view kMagicPrefix = "scdat";

Count sum_sizes(std::span<const Count> sizes) {
  Count total = 0;
  for (Count s : sizes) {
    const auto next = checked_add(total, s);
    if (!next) throw RangeError("sum of element sizes exceeds 26 decimal digits");
    total = *next;
  }
  return total;
}

void append_padded_payload(std::string& out, std::string_view payload, LineStyle style) {
  out.append(payload);
  out.append(pad_data(payload, style));
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

[[noreturn]] void truncated(std::uint64_t offset) {
  throw FormatError("section at byte " + std::to_string(offset) + " is truncated", Errc::truncated);
}

// Absolute end of a range, or throws `truncated` if it passes the file end.
std::uint64_t checked_end(Count begin, Count length, std::uint64_t file_size,
                          std::uint64_t section_offset) {
  const auto end = checked_add(begin, length);
  if (!end || *end > file_size) truncated(section_offset);
  return static_cast<std::uint64_t>(*end);
}

}  // namespace

std::string magic(int version) {
  if (version < kFormatVersion || version > kMaxFormatVersion) {
    throw RangeError("format version out of range");
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "sc%02xt%02x", 0xda, version);
  std::string out(buf);
  out.push_back(kMagicTerminator);
  return out;
}

std::string encode_file_header(const FileHeader& header, LineStyle style) {
  if (header.vendor.size() > kMaxVendorBytes) throw LengthError("vendor string exceeds 20 bytes");
  std::string out = magic(header.version);
  out.reserve(kFileHeaderBytes);
  out.append(pad_fixed(header.vendor, kVendorEntryBytes, style));
  out.append(encode_section_header('F', header.user, style));
  out.append(pad_data(std::string_view{}, style));
  return out;
}

int decode_magic(std::string_view bytes) {
  if (bytes.size() < kMagicBytes || bytes.substr(0, 2) != "sc" || bytes.substr(2, 2) != "da" || bytes[4] != 't') {
    throw FormatError("not an scda file", Errc::bad_magic);
  }
  const int hi = hex_value(bytes[5]);
  const int lo = hex_value(bytes[6]);
  if (hi < 0 || lo < 0) throw FormatError("invalid version digits", Errc::bad_magic);
  const int version = hi * 16 + lo;
  if (version < kFormatVersion) throw FormatError("format version below a0", Errc::bad_magic);
  if (bytes[7] != kMagicTerminator) throw FormatError("invalid magic terminator", Errc::bad_magic);
  return version;
}

bool starts_with_magic(std::string_view bytes) {
  try {
    decode_magic(bytes);
    return true;
  } catch (const FormatError&) {
    return false;
  }
}

FileHeader decode_file_header(std::string_view bytes) {
  if (bytes.size() != kFileHeaderBytes) {
    throw FormatError("file header is not 128 bytes", Errc::bad_magic);
  }
  const int version = decode_magic(bytes);

  FileHeader header;
  header.version = version;
  header.vendor = std::string(unpad_fixed(bytes.substr(kMagicBytes, kVendorEntryBytes)));
  const SectionHeader sh =
      decode_section_header(bytes.substr(kMagicBytes + kVendorEntryBytes, kSectionHeaderBytes));
  if (sh.type != 'F') throw FormatError("file header section is not of type F", Errc::bad_magic);
  header.user = sh.user;
  return header;
}

Section Section::inline_data(std::string user, std::string payload) {
  return Section{SectionKind::inline_data, std::move(user), 0, 0, {}, std::move(payload)};
}

Section Section::block(std::string user, std::string payload) {
  const Count e = payload.size();
  return Section{SectionKind::block, std::move(user), 0, e, {}, std::move(payload)};
}

Section Section::array(std::string user, Count n, Count e, std::string payload) {
  return Section{SectionKind::array, std::move(user), n, e, {}, std::move(payload)};
}

Section Section::varray(std::string user, std::vector<Count> sizes, std::string payload) {
  const Count n = sizes.size();
  return Section{SectionKind::varray, std::move(user), n, 0, std::move(sizes), std::move(payload)};
}

std::string encode_inline(std::string_view user, std::string_view payload, LineStyle style) {
  if (payload.size() != kInlineDataBytes) {
    throw LengthError("inline data must be exactly 32 bytes, got " + std::to_string(payload.size()));
  }
  std::string out = encode_section_header('I', user, style);
  out.append(payload);
  return out;
}

std::string encode_block(std::string_view user, std::string_view payload, LineStyle style) {
  std::string out = encode_section_header('B', user, style);
  out.append(encode_count(kByteSizeLetter, payload.size(), style));
  append_padded_payload(out, payload, style);
  return out;
}

std::string encode_array_fixed(std::string_view user, Count n, Count e, std::string_view payload,
                               LineStyle style) {
  if (n > kMaxCount || e > kMaxCount) throw RangeError("array count exceeds 26 decimal digits");
  const auto total = checked_mul(n, e);
  if (!total || *total != payload.size()) {
    throw LengthError("array payload is not N*E bytes");
  }
  std::string out = encode_section_header('A', user, style);
  out.append(encode_count(kElementCountLetter, n, style));
  out.append(encode_count(kByteSizeLetter, e, style));
  append_padded_payload(out, payload, style);
  return out;
}

std::string encode_array_var(std::string_view user, std::span<const Count> sizes,
                             std::string_view payload, LineStyle style) {
  if (sum_sizes(sizes) != payload.size()) {
    throw LengthError("variable array payload does not match the sum of element sizes");
  }
  std::string out = encode_section_header('V', user, style);
  out.append(encode_count(kElementCountLetter, sizes.size(), style));
  for (Count s : sizes) out.append(encode_count(kByteSizeLetter, s, style));
  append_padded_payload(out, payload, style);
  return out;
}

std::string encode_section(const Section& s, LineStyle style) {
  switch (s.kind) {
    case SectionKind::inline_data: return encode_inline(s.user, s.payload, style);
    case SectionKind::block:
      if (s.size != s.payload.size()) throw LengthError("block size does not match payload");
      return encode_block(s.user, s.payload, style);
    case SectionKind::array: return encode_array_fixed(s.user, s.count, s.size, s.payload, style);
    case SectionKind::varray:
      if (s.count != s.sizes.size()) throw LengthError("element count does not match size list");
      return encode_array_var(s.user, s.sizes, s.payload, style);
  }
  throw FormatError("unknown section kind");
}

Count encoded_length(SectionKind kind, Count n, Count payload_bytes) {
  const Count padded = payload_bytes + data_pad_length(payload_bytes);
  switch (kind) {
    case SectionKind::inline_data: return kInlineSectionBytes;
    case SectionKind::block: return kSectionHeaderBytes + kCountEntryBytes + padded;
    case SectionKind::array: return kSectionHeaderBytes + 2 * kCountEntryBytes + padded;
    case SectionKind::varray:
      return kSectionHeaderBytes + kCountEntryBytes + kCountEntryBytes * n + padded;
  }
  return 0;
}

std::string ByteSource::read(std::uint64_t offset, std::size_t length) const {
  std::string out(length, '\0');
  read_at(offset, out);
  return out;
}

void StringSource::read_at(std::uint64_t offset, std::span<char> out) const {
  if (offset > bytes_.size() || out.size() > bytes_.size() - offset) {
    throw FormatError("read past end of file", Errc::truncated);
  }
  std::memcpy(out.data(), bytes_.data() + offset, out.size());
}

SectionRecord parse_section_head(const ByteSource& source, std::uint64_t offset) {
  const std::uint64_t file_size = source.size();
  SectionRecord rec;
  rec.offset = offset;

  std::uint64_t cursor = checked_end(offset, kSectionHeaderBytes, file_size, offset);
  const std::string head = source.read(offset, kSectionHeaderBytes);
  if (starts_with_magic(head)) {
    throw FormatError("file header magic at byte " + std::to_string(offset), Errc::repeated_file_header);
  }
  const SectionHeader header = decode_section_header(head);
  if (header.type == 'F') {
    throw FormatError("file header section at byte " + std::to_string(offset),
                      Errc::repeated_file_header);
  }
  rec.kind = static_cast<SectionKind>(header.type);
  rec.user = header.user;

  auto read_count = [&](char letter) {
    const std::uint64_t at = cursor;
    cursor = checked_end(cursor, kCountEntryBytes, file_size, offset);
    return decode_count(source.read(at, kCountEntryBytes), letter);
  };

  Count payload = 0;
  switch (rec.kind) {
    case SectionKind::inline_data:
      rec.payload_offset = cursor;
      rec.payload_length = kInlineDataBytes;
      rec.end = checked_end(cursor, kInlineDataBytes, file_size, offset);
      return rec;
    case SectionKind::block:
      rec.size = read_count(kByteSizeLetter);
      payload = rec.size;
      break;
    case SectionKind::array: {
      rec.count = read_count(kElementCountLetter);
      rec.size = read_count(kByteSizeLetter);
      const auto total = checked_mul(rec.count, rec.size);
      if (!total) truncated(offset);
      payload = *total;
      break;
    }
    case SectionKind::varray: {
      rec.count = read_count(kElementCountLetter);
      rec.sizes_offset = cursor;
      const auto table = checked_mul(rec.count, kCountEntryBytes);
      if (!table) truncated(offset);
      rec.payload_offset = checked_end(cursor, *table, file_size, offset);
      return rec;
    }
  }
  rec.payload_offset = cursor;
  const std::uint64_t payload_end = checked_end(cursor, payload, file_size, offset);
  rec.payload_length = payload_end - cursor;
  rec.end = checked_end(payload_end, data_pad_length(payload), file_size, offset);
  return rec;
}

SectionRecord parse_next_section(const ByteSource& source, std::uint64_t offset) {
  SectionRecord rec = parse_section_head(source, offset);
  if (rec.kind != SectionKind::varray) return rec;

  const auto n = static_cast<std::size_t>(rec.count);
  rec.sizes.reserve(n);
  const std::string entries = source.read(rec.sizes_offset, n * kCountEntryBytes);
  Count payload = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Count e = decode_count(
        std::string_view(entries).substr(i * kCountEntryBytes, kCountEntryBytes), kByteSizeLetter);
    const auto next = checked_add(payload, e);
    if (!next) truncated(offset);
    payload = *next;
    rec.sizes.push_back(e);
  }
  const std::uint64_t file_size = source.size();
  const std::uint64_t payload_end = checked_end(rec.payload_offset, payload, file_size, offset);
  rec.payload_length = payload_end - rec.payload_offset;
  rec.end = checked_end(payload_end, data_pad_length(payload), file_size, offset);
  return rec;
}

FileIndex index_file(const ByteSource& source) {
  if (source.size() < kFileHeaderBytes) {
    throw FormatError("file shorter than its header", Errc::bad_magic);
  }
  FileIndex index;
  index.header = decode_file_header(source.read(0, kFileHeaderBytes));
  std::uint64_t cursor = kFileHeaderBytes;
  const std::uint64_t size = source.size();
  while (cursor < size) {
    if (size - cursor < kSectionHeaderBytes) {
      throw FormatError("trailing bytes at offset " + std::to_string(cursor), Errc::trailing_bytes);
    }
    index.sections.push_back(parse_next_section(source, cursor));
    cursor = index.sections.back().end;
  }
  return index;
}

std::string read_payload(const ByteSource& source, const SectionRecord& record) {
  return source.read(record.payload_offset, record.payload_length);
}

Section load_section(const ByteSource& source, const SectionRecord& record) {
  return Section{record.kind, record.user, record.count, record.size, record.sizes,
                 read_payload(source, record)};
}

}  // namespace scda

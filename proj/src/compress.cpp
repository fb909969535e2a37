#include "scda/compress.hpp"

#include "scda/error.hpp"
#include "scda/kernels.hpp"

namespace scda {
namespace {

[[noreturn]] void nonconforming(const std::string& what) {
  throw FormatError("compression wrapper: " + what, Errc::nonconforming_wrapper);
}

Count decode_u(std::string_view entry) {
  try {
    return decode_count(entry, kUncompressedLetter);
  } catch (const FormatError& e) {
    nonconforming(std::string("bad uncompressed size entry: ") + e.what());
  }
}

// Compressed elements as the data section of a pair.
Section compressed_varray(std::string_view user, const std::vector<CompressedElement>& elements) {
  std::vector<Count> sizes;
  sizes.reserve(elements.size());
  std::string payload;
  for (const auto& c : elements) {
    sizes.push_back(c.armored.size());
    payload.append(c.armored);
  }
  return Section::varray(std::string(user), std::move(sizes), std::move(payload));
}

std::string decode_one(std::string_view armored, Count expected) {
  std::string out = decompress_element(armored);
  if (out.size() != expected) {
    throw DecodeError(Errc::size_mismatch, "element size differs from the stated uncompressed size");
  }
  return out;
}

}  // namespace

std::string compression_magic(SectionKind wrapped) {
  return std::string(1, letter(wrapped)) + " compressed scda " + std::string(kCompressionVersion);
}

std::optional<SectionKind> detect_compression(SectionKind first_kind, std::string_view user) {
  if (first_kind == SectionKind::inline_data) {
    if (user == compression_magic(SectionKind::block)) return SectionKind::block;
    if (user == compression_magic(SectionKind::array)) return SectionKind::array;
  } else if (first_kind == SectionKind::array) {
    if (user == compression_magic(SectionKind::varray)) return SectionKind::varray;
  }
  return std::nullopt;
}

CompressedPair wrap_compressed_block(std::string_view user, std::string_view data, LineStyle style,
                                     int level) {
  CompressedElement element = compress_element(data, style, level);
  CompressedPair pair;
  pair.meta = Section::inline_data(compression_magic(SectionKind::block),
                                   encode_count(kUncompressedLetter, data.size(), style));
  pair.data = Section::block(std::string(user), std::move(element.armored));
  return pair;
}

CompressedPair wrap_compressed_array_fixed(std::string_view user, Count n, Count e,
                                           std::string_view payload, LineStyle style, int level) {
  if (n > kMaxCount || e > kMaxCount) throw RangeError("array count exceeds 26 decimal digits");
  if (!fits_u64(n) || !fits_u64(e)) throw LengthError("array does not fit in memory");
  const auto elements = split_fixed(payload, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(e));
  CompressedPair pair;
  pair.meta = Section::inline_data(compression_magic(SectionKind::array),
                                   encode_count(kUncompressedLetter, e, style));
  pair.data = compressed_varray(user, compress_elements(elements, style, level));
  return pair;
}

CompressedPair wrap_compressed_array_var(std::string_view user, std::span<const Count> sizes,
                                         std::string_view payload, LineStyle style, int level) {
  const auto elements = split_sizes(payload, sizes);
  std::string table;
  table.reserve(sizes.size() * kCountEntryBytes);
  for (Count s : sizes) table.append(encode_count(kUncompressedLetter, s, style));
  CompressedPair pair;
  pair.meta = Section::array(compression_magic(SectionKind::varray), sizes.size(), kCountEntryBytes,
                             std::move(table));
  pair.data = compressed_varray(user, compress_elements(elements, style, level));
  return pair;
}

Section unwrap_compressed(const Section& meta, const Section& data) {
  const auto wrapped = detect_compression(meta.kind, meta.user);
  if (!wrapped) nonconforming("first section does not carry a compression magic");

  switch (*wrapped) {
    case SectionKind::block: {
      if (data.kind != SectionKind::block) nonconforming("compressed block is not followed by a block");
      const Count u = decode_u(meta.payload);
      return Section::block(data.user, decode_one(data.payload, u));
    }
    case SectionKind::array: {
      if (data.kind != SectionKind::varray) nonconforming("compressed array is not followed by a V section");
      const Count u = decode_u(meta.payload);
      std::string payload;
      for (std::string_view element : split_sizes(data.payload, data.sizes)) {
        payload.append(decode_one(element, u));
      }
      return Section::array(data.user, data.count, u, std::move(payload));
    }
    case SectionKind::varray: {
      if (meta.size != kCountEntryBytes) nonconforming("metadata element size is not 32");
      if (data.kind != SectionKind::varray) nonconforming("compressed array is not followed by a V section");
      if (data.count != meta.count) nonconforming("element counts of the pair differ");
      std::vector<Count> sizes;
      std::string payload;
      const auto elements = split_sizes(data.payload, data.sizes);
      for (std::size_t i = 0; i < elements.size(); ++i) {
        const Count u = decode_u(std::string_view(meta.payload).substr(i * kCountEntryBytes, kCountEntryBytes));
        sizes.push_back(u);
        payload.append(decode_one(elements[i], u));
      }
      return Section::varray(data.user, std::move(sizes), std::move(payload));
    }
    case SectionKind::inline_data: break;
  }
  nonconforming("unknown wrapped kind");
}

void check_pair_layout(SectionKind wrapped, const SectionRecord& meta, const SectionRecord& data) {
  switch (wrapped) {
    case SectionKind::block:
      if (data.kind != SectionKind::block) nonconforming("compressed block is not followed by a block");
      return;
    case SectionKind::array:
      if (data.kind != SectionKind::varray) nonconforming("compressed array is not followed by a V section");
      return;
    case SectionKind::varray:
      if (meta.size != kCountEntryBytes) nonconforming("metadata element size is not 32");
      if (data.kind != SectionKind::varray) nonconforming("compressed array is not followed by a V section");
      if (data.count != meta.count) nonconforming("element counts of the pair differ");
      return;
    case SectionKind::inline_data: break;
  }
  nonconforming("unknown wrapped kind");
}

std::vector<LogicalSection> logical_sections(const ByteSource& source, const FileIndex& index,
                                             bool decode) {
  std::vector<LogicalSection> out;
  const auto& raw = index.sections;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const SectionRecord& r = raw[i];
    LogicalSection s{r.kind, r.user, r.count, r.size, r.sizes, false, i, 1, r.offset, r.length()};
    const auto wrapped = decode ? detect_compression(r.kind, r.user) : std::nullopt;
    if (wrapped) {
      if (i + 1 >= raw.size()) nonconforming("compression magic in the last section");
      const SectionRecord& d = raw[i + 1];
      check_pair_layout(*wrapped, r, d);
      const std::string meta = read_payload(source, r);
      s.kind = *wrapped;
      s.user = d.user;
      s.compressed = true;
      s.raw_count = 2;
      s.length = d.end - r.offset;
      s.sizes.clear();
      switch (*wrapped) {
        case SectionKind::block:
          s.count = 0;
          s.size = decode_u(meta);
          break;
        case SectionKind::array:
          s.count = d.count;
          s.size = decode_u(meta);
          break;
        default:
          s.count = d.count;
          s.size = 0;
          for (std::size_t k = 0; k < meta.size(); k += kCountEntryBytes) {
            s.sizes.push_back(decode_u(std::string_view(meta).substr(k, kCountEntryBytes)));
          }
          break;
      }
      ++i;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string logical_payload(const ByteSource& source, const FileIndex& index,
                            const LogicalSection& section) {
  const SectionRecord& first = index.sections.at(section.first_raw);
  if (!section.compressed) return read_payload(source, first);
  const SectionRecord& second = index.sections.at(section.first_raw + 1);
  return unwrap_compressed(load_section(source, first), load_section(source, second)).payload;
}

}  // namespace scda

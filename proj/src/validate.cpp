#include "scda/validate.hpp"

#include "scda/codec.hpp"
#include "scda/compress.hpp"

namespace scda {
namespace {

// Thrown inside the scan; carries the entry offset.
struct Stop {
  Violation v;
};

[[noreturn]] void stop(std::uint64_t offset, Errc code, std::string reason) {
  throw Stop{Violation{offset, code, std::move(reason)}};
}

class Scanner {
 public:
  Scanner(const ByteSource& source, bool strict) : src_(source), size_(source.size()), strict_(strict) {}

  ValidationReport run() {
    ValidationReport report;
    try {
      header();
      std::uint64_t at = kFileHeaderBytes;
      std::optional<Pair> open_pair;
      while (at < size_) {
        if (size_ - at < kSectionHeaderBytes) {
          stop(at, Errc::trailing_bytes, std::to_string(size_ - at) + " trailing bytes after the last section");
        }
        Raw sec = section(at);
        ++report.sections;
        if (strict_) wrappers(sec, open_pair);
        at = sec.end;
      }
      if (open_pair) {
        stop(open_pair->meta.offset, Errc::nonconforming_wrapper, "compression magic without a data section");
      }
      report.style = style_;
    } catch (const Stop& s) {
      report.violation = s.v;
    }
    return report;
  }

 private:
  struct Raw {
    SectionKind kind;
    std::string user;
    Count count = 0;
    Count size = 0;
    std::vector<Count> sizes;
    std::uint64_t offset = 0;
    std::uint64_t payload_offset = 0;
    Count payload_length = 0;
    std::uint64_t end = 0;
  };
  struct Pair {
    SectionKind wrapped;
    Raw meta;
  };

  std::string read(std::uint64_t at, std::uint64_t n) {
    if (at > size_ || n > size_ - at) {
      stop(at, Errc::truncated, "file ends inside the entry");
    }
    return src_.read(at, static_cast<std::size_t>(n));
  }

  void note_style(std::optional<LineStyle> s, std::uint64_t at, const char* what) {
    if (!strict_) return;
    if (!s) stop(at, Errc::bad_section_header, std::string(what) + " follows neither line style");
    if (!style_) {
      style_ = s;
    } else if (*style_ != *s) {
      stop(at, Errc::bad_section_header, std::string(what) + " switches line style");
    }
  }

  void header() {
    if (size_ < kFileHeaderBytes) stop(0, Errc::bad_magic, "file is shorter than the 128-byte header");
    const std::string bytes = read(0, kFileHeaderBytes);
    const std::string_view v(bytes);
    try {
      decode_magic(v);
    } catch (const Error& e) {
      stop(0, Errc::bad_magic, e.what());
    }
    try {
      unpad_fixed(v.substr(kMagicBytes, kVendorEntryBytes));
    } catch (const Error& e) {
      stop(kMagicBytes, Errc::bad_magic, std::string("vendor entry: ") + e.what());
    }
    const std::uint64_t head_at = kMagicBytes + kVendorEntryBytes;
    try {
      if (decode_section_header(v.substr(head_at, kSectionHeaderBytes)).type != 'F') {
        stop(head_at, Errc::bad_magic, "file header section is not of type F");
      }
    } catch (const Error& e) {
      stop(head_at, Errc::bad_magic, std::string("file header section: ") + e.what());
    }
    note_style(fixed_pad_style(v.substr(kMagicBytes, kVendorEntryBytes)), kMagicBytes, "vendor padding");
    note_style(fixed_pad_style(v.substr(kMagicBytes + kVendorEntryBytes, kSectionHeaderBytes)),
               kMagicBytes + kVendorEntryBytes, "header padding");
    const std::uint64_t pad_at = kMagicBytes + kVendorEntryBytes + kSectionHeaderBytes;
    note_style(data_pad_style(v.substr(pad_at), 0, std::nullopt), pad_at, "header data padding");
  }

  Count count_entry(std::uint64_t at, char letter) {
    const std::string entry = read(at, kCountEntryBytes);
    Count c = 0;
    try {
      c = decode_count(entry, letter);
    } catch (const Error& e) {
      stop(at, e.code(), e.what());
    }
    note_style(fixed_pad_style(entry), at, "count entry padding");
    return c;
  }

  // `blame` is the entry whose value makes the range overrun the file.
  std::uint64_t advance(std::uint64_t at, Count n, std::uint64_t blame) {
    const auto end = checked_add(at, n);
    if (!end || *end > size_) {
      stop(blame, Errc::truncated, "entry at byte " + std::to_string(blame) + " points past the end of file");
    }
    return static_cast<std::uint64_t>(*end);
  }

  Raw section(std::uint64_t at) {
    Raw r;
    r.offset = at;
    const std::string head = read(at, kSectionHeaderBytes);
    if (starts_with_magic(head)) stop(at, Errc::repeated_file_header, "second file header");
    SectionHeader h;
    try {
      h = decode_section_header(head);
    } catch (const Error& e) {
      stop(at, e.code(), std::string("section header: ") + e.what());
    }
    if (h.type == 'F') stop(at, Errc::repeated_file_header, "second file header");
    note_style(fixed_pad_style(head), at, "section header padding");
    r.kind = static_cast<SectionKind>(h.type);
    r.user = h.user;

    std::uint64_t cur = at + kSectionHeaderBytes;
    if (r.kind == SectionKind::inline_data) {
      r.payload_offset = cur;
      r.payload_length = kInlineDataBytes;
      r.end = advance(cur, kInlineDataBytes, at);
      return r;
    }
    Count payload = 0;
    std::uint64_t blame = at;
    switch (r.kind) {
      case SectionKind::block:
        r.size = count_entry(cur, kByteSizeLetter);
        blame = cur;
        cur += kCountEntryBytes;
        payload = r.size;
        break;
      case SectionKind::array: {
        r.count = count_entry(cur, kElementCountLetter);
        r.size = count_entry(cur + kCountEntryBytes, kByteSizeLetter);
        const auto total = checked_mul(r.count, r.size);
        if (!total) stop(cur, Errc::count_overflow, "N*E exceeds 26 decimal digits");
        blame = r.size > size_ ? cur + kCountEntryBytes : cur;
        cur += 2 * kCountEntryBytes;
        payload = *total;
        break;
      }
      default: {
        r.count = count_entry(cur, kElementCountLetter);
        cur += kCountEntryBytes;
        const auto table = checked_mul(r.count, kCountEntryBytes);
        if (!table) stop(cur - kCountEntryBytes, Errc::count_overflow, "size table exceeds the file");
        const std::uint64_t table_end = advance(cur, *table, cur - kCountEntryBytes);
        for (Count i = 0; i < r.count; ++i) {
          const Count e = count_entry(cur, kByteSizeLetter);
          const auto next = checked_add(payload, e);
          if (!next) stop(cur, Errc::count_overflow, "sum of element sizes exceeds 26 decimal digits");
          payload = *next;
          advance(table_end, payload, cur);
          r.sizes.push_back(e);
          cur += kCountEntryBytes;
        }
        if (r.count > 0) blame = cur - kCountEntryBytes;
      }
    }
    r.payload_offset = cur;
    r.payload_length = payload;
    const std::uint64_t payload_end = advance(cur, payload, blame);
    const std::size_t p = data_pad_length(payload);
    r.end = advance(payload_end, p, blame);
    if (strict_) {
      std::optional<char> last;
      if (payload > 0) last = read(payload_end - 1, 1)[0];
      note_style(data_pad_style(read(payload_end, p), payload, last), payload_end, "data padding");
    }
    return r;
  }

  std::string payload(const Raw& r) { return read(r.payload_offset, static_cast<std::uint64_t>(r.payload_length)); }

  Count u_entry(std::string_view entry, std::uint64_t at) {
    try {
      return decode_count(entry, kUncompressedLetter);
    } catch (const Error& e) {
      stop(at, Errc::nonconforming_wrapper, std::string("uncompressed size entry: ") + e.what());
    }
  }

  void element(std::string_view armored, Count u, std::uint64_t at) {
    try {
      const std::string out = decompress_element(armored);
      if (out.size() != u) stop(at, Errc::size_mismatch, "element size differs from its metadata entry");
    } catch (const Error& e) {
      stop(at, e.code(), std::string("compressed element: ") + e.what());
    }
  }

  // Strict wrapper checks.  `open_pair` holds a metadata section waiting for
  // its data section.
  void wrappers(const Raw& sec, std::optional<Pair>& open_pair) {
    if (!open_pair) {
      if (const auto wrapped = detect_compression(sec.kind, sec.user)) open_pair = Pair{*wrapped, sec};
      return;
    }
    const Pair pair = std::move(*open_pair);
    open_pair.reset();
    const Raw& meta = pair.meta;
    const auto bad = [&](const char* why) { stop(sec.offset, Errc::nonconforming_wrapper, why); };
    const std::string meta_bytes = payload(meta);
    switch (pair.wrapped) {
      case SectionKind::block: {
        if (sec.kind != SectionKind::block) bad("compressed block is not followed by a block");
        const Count u = u_entry(meta_bytes, meta.payload_offset);
        element(payload(sec), u, sec.payload_offset);
        return;
      }
      case SectionKind::array: {
        if (sec.kind != SectionKind::varray) bad("compressed array is not followed by a V section");
        const Count u = u_entry(meta_bytes, meta.payload_offset);
        elements(sec, [&](std::size_t) { return u; });
        return;
      }
      default: {
        if (meta.size != kCountEntryBytes) {
          stop(meta.offset, Errc::nonconforming_wrapper, "metadata element size is not 32");
        }
        if (sec.kind != SectionKind::varray) bad("compressed array is not followed by a V section");
        if (sec.count != meta.count) bad("element counts of the pair differ");
        std::vector<Count> us;
        for (std::size_t i = 0; i < meta_bytes.size(); i += kCountEntryBytes) {
          us.push_back(u_entry(std::string_view(meta_bytes).substr(i, kCountEntryBytes), meta.payload_offset + i));
        }
        elements(sec, [&](std::size_t i) { return us[i]; });
      }
    }
  }

  template <typename U>
  void elements(const Raw& sec, U&& u_of) {
    const std::string bytes = payload(sec);
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < sec.sizes.size(); ++i) {
      const auto n = static_cast<std::size_t>(sec.sizes[i]);
      element(std::string_view(bytes).substr(static_cast<std::size_t>(pos), n), u_of(i), sec.payload_offset + pos);
      pos += n;
    }
  }

  const ByteSource& src_;
  std::uint64_t size_;
  bool strict_;
  std::optional<LineStyle> style_;
};

}  // namespace

ValidationReport validate(const ByteSource& source, bool strict) { return Scanner(source, strict).run(); }

}  // namespace scda

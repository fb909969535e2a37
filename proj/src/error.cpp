#include "scda/error.hpp"

#include <algorithm>
#include <cstring>

namespace scda {

ErrorGroup group_of(Errc code) {
  const int v = static_cast<int>(code);
  if (v == 0) return ErrorGroup::none;
  switch (v / 100) {
    case 1: return ErrorGroup::corrupt_contents;
    case 2: return ErrorGroup::file_system;
    default: return ErrorGroup::usage;
  }
}

std::string_view message(Errc code) {
  switch (code) {
    case Errc::ok: return "no error";
    case Errc::bad_magic: return "corrupt file: invalid file header magic or version";
    case Errc::bad_section_header: return "corrupt file: invalid section header";
    case Errc::bad_count_entry: return "corrupt file: invalid count entry";
    case Errc::truncated: return "corrupt file: section truncated by end of file";
    case Errc::repeated_file_header: return "corrupt file: file header section occurs again";
    case Errc::trailing_bytes: return "corrupt file: trailing bytes after last section";
    case Errc::nonconforming_wrapper: return "corrupt file: compression wrapper does not conform";
    case Errc::bad_base64: return "corrupt file: invalid base64 armor";
    case Errc::missing_z_marker: return "corrupt file: missing z marker in compressed element";
    case Errc::inflate_failed: return "corrupt file: deflate stream does not inflate";
    case Errc::checksum_mismatch: return "corrupt file: adler32 checksum mismatch";
    case Errc::size_mismatch: return "corrupt file: uncompressed size mismatch";
    case Errc::count_overflow: return "corrupt file: count does not fit into 64 bits";
    case Errc::fs_open: return "file system: cannot open file";
    case Errc::fs_read: return "file system: read failed";
    case Errc::fs_write: return "file system: write failed";
    case Errc::fs_flush: return "file system: flush failed";
    case Errc::fs_close: return "file system: close failed";
    case Errc::invalid_argument: return "usage: invalid argument";
    case Errc::bad_mode: return "usage: mode must be 'w' or 'r'";
    case Errc::call_sequence: return "usage: function called out of sequence";
    case Errc::collective_mismatch: return "usage: collective parameter differs between ranks";
    case Errc::context_closed: return "usage: file context is not open";
    case Errc::length_mismatch: return "usage: byte count does not match";
    case Errc::partition_mismatch: return "usage: partition does not match the section";
    case Errc::root_out_of_range: return "usage: root rank out of range";
    case Errc::count_range: return "usage: count exceeds 26 decimal digits";
    case Errc::collective_aborted: return "usage: a rank left a collective call";
  }
  return {};
}

bool is_valid_code(int code) { return !message(static_cast<Errc>(code)).empty(); }

int ferror_string(int code, std::span<char> buf, std::size_t& len) {
  if (!is_valid_code(code)) {
    len = 0;
    if (!buf.empty()) buf[0] = '\0';
    return -1;
  }
  const std::string_view text = message(static_cast<Errc>(code));
  len = 0;
  if (!buf.empty()) {
    len = std::min(text.size(), buf.size() - 1);
    std::memcpy(buf.data(), text.data(), len);
    buf[len] = '\0';
  }
  return 0;
}

}  // namespace scda

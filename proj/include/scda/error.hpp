#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scda {

/// The three groups of checked runtime errors, plus "no error".
enum class ErrorGroup { none, corrupt_contents, file_system, usage };

/// Error codes set by every file API call.  0 means success.  The hundreds
/// digit selects the group.
enum class Errc : int {
  ok = 0,

  bad_magic = 101,
  bad_section_header = 102,
  bad_count_entry = 103,
  truncated = 104,
  repeated_file_header = 105,
  trailing_bytes = 106,
  nonconforming_wrapper = 107,
  bad_base64 = 108,
  missing_z_marker = 109,
  inflate_failed = 110,
  checksum_mismatch = 111,
  size_mismatch = 112,
  count_overflow = 113,

  fs_open = 201,
  fs_read = 202,
  fs_write = 203,
  fs_flush = 204,
  fs_close = 205,

  invalid_argument = 301,
  bad_mode = 302,
  call_sequence = 303,
  collective_mismatch = 304,
  context_closed = 305,
  length_mismatch = 306,
  partition_mismatch = 307,
  root_out_of_range = 308,
  count_range = 309,
  collective_aborted = 310,
};

ErrorGroup group_of(Errc code);

/// Fixed human-readable text for a code.  Empty for integers that are not
/// codes.
std::string_view message(Errc code);

bool is_valid_code(int code);

/// Copies the message for `code` into `buf`, truncated to leave room for a
/// terminating NUL, and stores the number of message bytes written in `len`.  Returns 0 for
/// every valid code including 0, and a negative value otherwise.
int ferror_string(int code, std::span<char> buf, std::size_t& len);

/// Base of the exceptions thrown by the encoding layers.  The file API
/// catches these and turns them into codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Input does not parse as the format demands.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, Errc code = Errc::bad_section_header)
      : Error(code, what) {}
};

/// An argument has a length the format cannot hold.
class LengthError : public Error {
 public:
  explicit LengthError(const std::string& what) : Error(Errc::length_mismatch, what) {}
};

/// A count exceeds 26 decimal digits, or a header value is out of range.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(Errc::count_range, what) {}
};

/// A compressed element fails one of its integrity checks.
class DecodeError : public Error {
 public:
  DecodeError(Errc code, const std::string& what) : Error(code, what) {}
};

/// Partition arguments do not agree with the section.
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what) : Error(Errc::partition_mismatch, what) {}
};

class IoError : public Error {
 public:
  IoError(Errc code, const std::string& what) : Error(code, what) {}
};

}  // namespace scda

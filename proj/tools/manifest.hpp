#pragma once

// Line-oriented description of a file for `scda create`:
//
//   # comment
//   F "file user"
//   I "user" text=<32 bytes> | data=<path>
//   B "user" data=<path> | text=<bytes>
//   A "user" N=<count> E=<size> data=<path>
//   V "user" sizes=<e0>,<e1>,... data=<path>
//
// Any data line may add encode=yes|no.  Paths are relative to the manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scda::cli {

struct ManifestError : std::runtime_error {
  ManifestError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct ManifestEntry {
  std::size_t line = 0;
  char type = 0;
  std::string user;
  std::string data;                  // loaded payload
  std::uint64_t count = 0;           // A
  std::uint64_t element_size = 0;    // A
  std::vector<std::uint64_t> sizes;  // V
  std::optional<bool> encode;
};

struct Manifest {
  std::string user;
  std::vector<ManifestEntry> entries;
};

/// Backslash escapes for bytes outside printable ASCII, '"' and '\'.
std::string escape(std::string_view bytes);
/// Inverse of escape; also accepts \n, \r and \t.  Throws std::invalid_argument.
std::string unescape(std::string_view text);

/// Parses manifest text and loads payload files from `base`.  Throws
/// ManifestError naming the line.
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base);
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace scda::cli

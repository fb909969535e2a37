#pragma once

// Collective file context API.  Every rank of a Comm holds one File; all
// calls are collective over the comm and advance a forward-only cursor by
// one section.  Parameters are collective except the rank-local data
// buffers and element sizes.  A failing call closes the file on every rank
// and leaves the handles empty.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "scda/codec.hpp"
#include "scda/comm.hpp"
#include "scda/count.hpp"
#include "scda/error.hpp"
#include "scda/storage.hpp"
#include "scda/wire.hpp"

namespace scda {

/// Vendor string written into every file header.
inline constexpr std::string_view kVendor = "scda-kit 0.1";

/// Outcome of one API call.
struct Status {
  Errc code = Errc::ok;
  std::string detail;

  bool ok() const { return code == Errc::ok; }
  ErrorGroup group() const { return group_of(code); }
};

struct FileOptions {
  LineStyle style = LineStyle::Unix;
  int level = kBestLevel;
};

/// Section metadata reported by File::read_section_header.
struct SectionInfo {
  bool end_of_file = false;
  char type = 0;
  Count count = 0;  // N
  Count size = 0;   // E
  std::string user;
};

/// Rank-local array elements: one contiguous buffer, or one buffer per
/// element (indirect addressing).
using ArrayInput = std::variant<std::string_view, std::span<const std::string_view>>;

/// Destination for rank-local array elements; monostate skips the data on
/// this rank.
using ArrayOutput = std::variant<std::monostate, std::span<char>, std::span<const std::span<char>>>;

class File {
 public:
  File();
  ~File();
  File(File&&) noexcept;
  File& operator=(File&&) noexcept;

  /// mode 'w' creates or truncates the file and writes the header with
  /// `user`; mode 'r' validates the header and stores its user string in
  /// `user`.
  static File open(Comm& comm, std::shared_ptr<Medium> medium, char mode, std::string& user,
                   Status& status, const FileOptions& options = {});
  static File open(Comm& comm, const std::filesystem::path& path, char mode, std::string& user,
                   Status& status, const FileOptions& options = {});

  bool is_open() const { return impl_ != nullptr; }
  std::uint64_t cursor() const;

  /// Flushes and closes.  The context is released whatever the outcome.
  Status close();

  Status write_inline(std::string_view data, std::string_view user, int root);
  Status write_block(std::string_view data, Count size, std::string_view user, int root, bool encode);
  Status write_array(const ArrayInput& data, std::span<const std::uint64_t> counts,
                     std::uint64_t element_size, std::string_view user, bool encode);
  /// `local_sizes` are this rank's element sizes; `rank_bytes` is the
  /// collective list of per-rank byte totals.
  Status write_varray(const ArrayInput& data, std::span<const std::uint64_t> counts,
                      std::span<const std::uint64_t> local_sizes,
                      std::span<const std::uint64_t> rank_bytes, std::string_view user, bool encode);

  /// `decode` is in/out: pass true to fold a compressed pair into its
  /// logical section; on return it tells whether that happened.
  Status read_section_header(SectionInfo& info, bool& decode);
  Status read_inline_data(std::optional<std::span<char>> out, int root);
  Status read_block_data(std::optional<std::span<char>> out, Count size, int root);
  Status read_array_data(const ArrayOutput& out, std::span<const std::uint64_t> counts,
                         std::uint64_t element_size);
  Status read_varray_sizes(std::optional<std::span<std::uint64_t>> sizes,
                           std::span<const std::uint64_t> counts);
  Status read_varray_data(const ArrayOutput& out, std::span<const std::uint64_t> counts,
                          std::span<const std::uint64_t> local_sizes,
                          std::span<const std::uint64_t> rank_bytes);

 private:
  class Impl;
  explicit File(std::unique_ptr<Impl> impl);
  template <typename Body>
  Status guarded(Body&& body);
  std::unique_ptr<Impl> impl_;
};

}  // namespace scda

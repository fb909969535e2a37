#pragma once

// Byte storage behind a file context.  A Medium names one file; every rank
// opens its own Storage handle onto it and reads or writes disjoint ranges
// at explicit offsets.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>

#include "scda/sections.hpp"

namespace scda {

class Storage {
 public:
  virtual ~Storage() = default;
  /// Throws IoError(fs_write).
  virtual void write_at(std::uint64_t offset, std::string_view bytes) = 0;
  /// Throws FormatError(truncated) past the end, IoError(fs_read) otherwise.
  virtual void read_at(std::uint64_t offset, std::span<char> out) = 0;
  virtual std::uint64_t size() = 0;
  virtual void flush() = 0;
  virtual void close() = 0;
};

enum class AccessMode { read, write };

class Medium {
 public:
  virtual ~Medium() = default;
  /// `create` truncates or creates the file; only one rank passes it.
  /// Throws IoError(fs_open).
  virtual std::unique_ptr<Storage> open(AccessMode mode, bool create) = 0;
};

/// POSIX file accessed with pread/pwrite.
class DiskMedium final : public Medium {
 public:
  explicit DiskMedium(std::filesystem::path path) : path_(std::move(path)) {}
  std::unique_ptr<Storage> open(AccessMode mode, bool create) override;

 private:
  std::filesystem::path path_;
};

/// Shared in-memory file image.
class MemoryMedium final : public Medium {
 public:
  MemoryMedium() = default;
  explicit MemoryMedium(std::string contents) : bytes_(std::move(contents)) {}

  std::unique_ptr<Storage> open(AccessMode mode, bool create) override;
  std::string contents() const;

 private:
  friend class MemoryStorage;
  mutable std::mutex mutex_;
  std::string bytes_;
};

/// Operations counted by FaultyMedium, across all ranks.
enum class StorageOp { open, read, write, flush, close };

/// Wraps another medium and fails exactly one storage operation: the
/// `trigger`-th (0-based) operation of kind `op` across all handles.
class FaultyMedium final : public Medium {
 public:
  FaultyMedium(std::shared_ptr<Medium> inner, StorageOp op, std::uint64_t trigger)
      : inner_(std::move(inner)), op_(op), trigger_(trigger) {}

  std::unique_ptr<Storage> open(AccessMode mode, bool create) override;

  /// True once the fault has been injected.
  bool fired() const { return fired_.load(); }
  /// Returns true on the operation that must fail.
  bool tick(StorageOp op);

 private:
  std::shared_ptr<Medium> inner_;
  StorageOp op_;
  std::uint64_t trigger_;
  std::atomic<std::uint64_t> seen_{0};
  std::atomic<bool> fired_{false};
};

/// ByteSource view of a storage handle.
class StorageSource final : public ByteSource {
 public:
  explicit StorageSource(Storage& storage) : storage_(&storage), size_(storage.size()) {}
  std::uint64_t size() const override { return size_; }
  void read_at(std::uint64_t offset, std::span<char> out) const override;

 private:
  Storage* storage_;
  std::uint64_t size_;
};

}  // namespace scda

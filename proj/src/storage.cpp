#include "scda/storage.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "scda/error.hpp"

namespace scda {
namespace {

std::string errno_text(const std::string& what, const std::filesystem::path& path) {
  return what + " " + path.string() + ": " + std::strerror(errno);
}

class DiskStorage final : public Storage {
 public:
  DiskStorage(int fd, std::filesystem::path path) : fd_(fd), path_(std::move(path)) {}
  ~DiskStorage() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write_at(std::uint64_t offset, std::string_view bytes) override {
    while (!bytes.empty()) {
      const ssize_t n = ::pwrite(fd_, bytes.data(), bytes.size(), static_cast<off_t>(offset));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw IoError(Errc::fs_write, errno_text("cannot write", path_));
      }
      bytes.remove_prefix(static_cast<std::size_t>(n));
      offset += static_cast<std::uint64_t>(n);
    }
  }

  void read_at(std::uint64_t offset, std::span<char> out) override {
    while (!out.empty()) {
      const ssize_t n = ::pread(fd_, out.data(), out.size(), static_cast<off_t>(offset));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw IoError(Errc::fs_read, errno_text("cannot read", path_));
      }
      if (n == 0) throw FormatError("unexpected end of file", Errc::truncated);
      out = out.subspan(static_cast<std::size_t>(n));
      offset += static_cast<std::uint64_t>(n);
    }
  }

  std::uint64_t size() override {
    struct stat st {};
    if (::fstat(fd_, &st) != 0) throw IoError(Errc::fs_read, errno_text("cannot stat", path_));
    return static_cast<std::uint64_t>(st.st_size);
  }

  void flush() override {}

  void close() override {
    if (fd_ < 0) return;
    const int fd = fd_;
    fd_ = -1;
    if (::close(fd) != 0) throw IoError(Errc::fs_close, errno_text("cannot close", path_));
  }

 private:
  int fd_;
  std::filesystem::path path_;
};

}  // namespace

class MemoryStorage final : public Storage {
 public:
  explicit MemoryStorage(MemoryMedium& medium) : medium_(&medium) {}

  void write_at(std::uint64_t offset, std::string_view bytes) override {
    std::lock_guard lock(medium_->mutex_);
    auto& buf = medium_->bytes_;
    if (buf.size() < offset + bytes.size()) buf.resize(offset + bytes.size(), '\0');
    std::memcpy(buf.data() + offset, bytes.data(), bytes.size());
  }

  void read_at(std::uint64_t offset, std::span<char> out) override {
    std::lock_guard lock(medium_->mutex_);
    const auto& buf = medium_->bytes_;
    if (offset > buf.size() || out.size() > buf.size() - offset) {
      throw FormatError("unexpected end of file", Errc::truncated);
    }
    std::memcpy(out.data(), buf.data() + offset, out.size());
  }

  std::uint64_t size() override {
    std::lock_guard lock(medium_->mutex_);
    return medium_->bytes_.size();
  }

  void flush() override {}
  void close() override {}

 private:
  MemoryMedium* medium_;
};

namespace {

class FaultyStorage final : public Storage {
 public:
  FaultyStorage(std::unique_ptr<Storage> inner, FaultyMedium& medium)
      : inner_(std::move(inner)), medium_(&medium) {}

  void write_at(std::uint64_t offset, std::string_view bytes) override {
    if (medium_->tick(StorageOp::write)) throw IoError(Errc::fs_write, "injected write failure");
    inner_->write_at(offset, bytes);
  }
  void read_at(std::uint64_t offset, std::span<char> out) override {
    if (medium_->tick(StorageOp::read)) throw IoError(Errc::fs_read, "injected read failure");
    inner_->read_at(offset, out);
  }
  std::uint64_t size() override { return inner_->size(); }
  void flush() override {
    if (medium_->tick(StorageOp::flush)) throw IoError(Errc::fs_flush, "injected flush failure");
    inner_->flush();
  }
  void close() override {
    const bool fail = medium_->tick(StorageOp::close);
    inner_->close();
    if (fail) throw IoError(Errc::fs_close, "injected close failure");
  }

 private:
  std::unique_ptr<Storage> inner_;
  FaultyMedium* medium_;
};

}  // namespace

std::unique_ptr<Storage> DiskMedium::open(AccessMode mode, bool create) {
  int flags = mode == AccessMode::read ? O_RDONLY : O_RDWR;
  if (mode == AccessMode::write && create) flags |= O_CREAT | O_TRUNC;
  const int fd = ::open(path_.c_str(), flags | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError(Errc::fs_open, errno_text("cannot open", path_));
  return std::make_unique<DiskStorage>(fd, path_);
}

std::unique_ptr<Storage> MemoryMedium::open(AccessMode mode, bool create) {
  if (mode == AccessMode::write && create) {
    std::lock_guard lock(mutex_);
    bytes_.clear();
  }
  return std::make_unique<MemoryStorage>(*this);
}

std::string MemoryMedium::contents() const {
  std::lock_guard lock(mutex_);
  return bytes_;
}

bool FaultyMedium::tick(StorageOp op) {
  if (op != op_) return false;
  const bool fire = seen_.fetch_add(1) == trigger_;
  if (fire) fired_ = true;
  return fire;
}

std::unique_ptr<Storage> FaultyMedium::open(AccessMode mode, bool create) {
  if (tick(StorageOp::open)) throw IoError(Errc::fs_open, "injected open failure");
  return std::make_unique<FaultyStorage>(inner_->open(mode, create), *this);
}

void StorageSource::read_at(std::uint64_t offset, std::span<char> out) const {
  if (offset > size_ || out.size() > size_ - offset) {
    throw FormatError("unexpected end of file", Errc::truncated);
  }
  storage_->read_at(offset, out);
}

}  // namespace scda

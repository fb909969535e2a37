#pragma once

// Minimal length-prefixed encoding for messages exchanged between ranks.

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scda/count.hpp"
#include "scda/error.hpp"

namespace scda::detail {

class Packer {
 public:
  Packer& u64(std::uint64_t v) {
    char b[8];
    std::memcpy(b, &v, 8);
    buf_.append(b, 8);
    return *this;
  }
  Packer& count(Count v) {
    u64(static_cast<std::uint64_t>(v));
    return u64(static_cast<std::uint64_t>(v >> 64));
  }
  Packer& str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
    return *this;
  }
  Packer& u64s(std::span<const std::uint64_t> v) {
    u64(v.size());
    for (auto x : v) u64(x);
    return *this;
  }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Unpacker {
 public:
  explicit Unpacker(std::string_view in) : in_(in) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, in_.data(), 8);
    in_.remove_prefix(8);
    return v;
  }
  Count count() {
    const Count lo = u64();
    const Count hi = u64();
    return lo | (hi << 64);
  }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(in_.substr(0, n));
    in_.remove_prefix(n);
    return s;
  }
  std::vector<std::uint64_t> u64s() {
    const std::uint64_t n = u64();
    std::vector<std::uint64_t> v;
    v.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(u64());
    return v;
  }

 private:
  void need(std::uint64_t n) const {
    if (in_.size() < n) throw Error(Errc::invalid_argument, "malformed message between ranks");
  }
  std::string_view in_;
};

}  // namespace scda::detail

#include "deflate.hpp"

#include <algorithm>

#include "scda/error.hpp"

#ifdef SCDA_HAVE_ZLIB
#include <zlib.h>
#endif

namespace scda::detail {
namespace {

constexpr std::size_t kMaxStoredBlock = 65535;

void put_be32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

std::uint32_t get_be32(std::string_view in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(in[i]);
  return v;
}

void check_header(std::string_view stream) {
  if (stream.size() < 6) throw DecodeError(Errc::inflate_failed, "deflate stream too short");
  const auto cmf = static_cast<unsigned char>(stream[0]);
  const auto flg = static_cast<unsigned char>(stream[1]);
  if ((cmf & 0x0f) != 8 || (cmf >> 4) > 7 || (cmf * 256u + flg) % 31 != 0 || (flg & 0x20) != 0) {
    throw DecodeError(Errc::inflate_failed, "invalid zlib stream header");
  }
}

void check_trailer(std::string_view trailer, std::string_view output) {
  if (trailer.size() != 4) {
    throw DecodeError(Errc::inflate_failed, "deflate stream has a malformed trailer");
  }
  if (get_be32(trailer) != adler32(output)) {
    throw DecodeError(Errc::checksum_mismatch, "adler32 checksum mismatch");
  }
}

[[noreturn]] void too_long() {
  throw DecodeError(Errc::size_mismatch, "inflated data exceeds the stated size");
}

}  // namespace

std::uint32_t adler32(std::string_view data, std::uint32_t start) {
  constexpr std::uint32_t kMod = 65521;
  std::uint32_t a = start & 0xffff;
  std::uint32_t b = start >> 16;
  // 5552 is the largest run that cannot overflow 32 bits before reducing
  while (!data.empty()) {
    const std::size_t n = std::min<std::size_t>(data.size(), 5552);
    for (std::size_t i = 0; i < n; ++i) {
      a += static_cast<unsigned char>(data[i]);
      b += a;
    }
    a %= kMod;
    b %= kMod;
    data.remove_prefix(n);
  }
  return (b << 16) | a;
}

std::string zlib_stored(std::string_view data) {
  std::string out;
  out.reserve(data.size() + data.size() / kMaxStoredBlock * 5 + 11);
  out.push_back(static_cast<char>(0x78));
  out.push_back(static_cast<char>(0x01));
  std::string_view rest = data;
  do {
    const std::size_t n = std::min(rest.size(), kMaxStoredBlock);
    const bool last = n == rest.size();
    out.push_back(static_cast<char>(last ? 1 : 0));
    out.push_back(static_cast<char>(n & 0xff));
    out.push_back(static_cast<char>(n >> 8));
    out.push_back(static_cast<char>(~n & 0xff));
    out.push_back(static_cast<char>((~n >> 8) & 0xff));
    out.append(rest.substr(0, n));
    rest.remove_prefix(n);
  } while (!rest.empty());
  put_be32(out, adler32(data));
  return out;
}

bool have_zlib() {
#ifdef SCDA_HAVE_ZLIB
  return true;
#else
  return false;
#endif
}

std::string zlib_compress(std::string_view data, int level) {
#ifdef SCDA_HAVE_ZLIB
  if (level != 0) {
    uLongf bound = compressBound(static_cast<uLong>(data.size()));
    std::string out(bound, '\0');
    const int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                             reinterpret_cast<const Bytef*>(data.data()),
                             static_cast<uLong>(data.size()), level);
    if (rc != Z_OK) throw Error(Errc::invalid_argument, "zlib compress2 failed");
    out.resize(bound);
    return out;
  }
#else
  (void)level;
#endif
  return zlib_stored(data);
}

std::string zlib_inflate_stored(std::string_view stream, std::uint64_t expected) {
  check_header(stream);
  std::string out;
  std::size_t pos = 2;
  for (bool final = false; !final;) {
    if (pos + 5 > stream.size()) throw DecodeError(Errc::inflate_failed, "deflate stream truncated");
    const auto head = static_cast<unsigned char>(stream[pos]);
    final = (head & 1) != 0;
    if (((head >> 1) & 3) != 0) {
      throw DecodeError(Errc::inflate_failed, "compressed deflate blocks need zlib");
    }
    const std::size_t len = static_cast<unsigned char>(stream[pos + 1]) |
                            (static_cast<std::size_t>(static_cast<unsigned char>(stream[pos + 2])) << 8);
    const std::size_t nlen = static_cast<unsigned char>(stream[pos + 3]) |
                             (static_cast<std::size_t>(static_cast<unsigned char>(stream[pos + 4])) << 8);
    if ((len ^ 0xffff) != nlen) throw DecodeError(Errc::inflate_failed, "stored block length check");
    pos += 5;
    if (pos + len > stream.size()) throw DecodeError(Errc::inflate_failed, "deflate stream truncated");
    if (out.size() + len > expected) too_long();
    out.append(stream.substr(pos, len));
    pos += len;
  }
  check_trailer(stream.substr(pos), out);
  return out;
}

std::string zlib_inflate(std::string_view stream, std::uint64_t expected) {
#ifdef SCDA_HAVE_ZLIB
  check_header(stream);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw DecodeError(Errc::inflate_failed, "inflateInit failed");
  std::string out;
  std::string chunk(std::min<std::uint64_t>(expected, 1 << 16) + 1, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(stream.data() + 2));
  zs.avail_in = static_cast<uInt>(stream.size() - 2);
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    const std::size_t produced = chunk.size() - zs.avail_out;
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw DecodeError(Errc::inflate_failed, "deflate stream is invalid");
    }
    if (out.size() + produced > expected) {
      inflateEnd(&zs);
      too_long();
    }
    out.append(chunk.data(), produced);
    if (rc == Z_OK && produced == 0 && zs.avail_in == 0) {
      inflateEnd(&zs);
      throw DecodeError(Errc::inflate_failed, "deflate stream truncated");
    }
  }
  const std::size_t consumed = stream.size() - zs.avail_in;
  inflateEnd(&zs);
  check_trailer(stream.substr(consumed), out);
  return out;
#else
  return zlib_inflate_stored(stream, expected);
#endif
}

}  // namespace scda::detail

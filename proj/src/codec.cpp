#include "scda/codec.hpp"

#include <array>

#include "deflate.hpp"
#include "scda/error.hpp"

namespace scda {
namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_reverse() {
  std::array<int, 256> table{};
  for (auto& v : table) v = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
    table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  }
  return table;
}

constexpr auto kReverse = make_reverse();

std::string stage_one(std::string_view data, int level) {
  const std::uint64_t u = data.size();
  std::string out;
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((u >> shift) & 0xff));
  out.push_back(kCompressionMarker);
  out.append(level == kStoredLevel ? detail::zlib_stored(data) : detail::zlib_compress(data, level));
  return out;
}

std::uint64_t read_size_prefix(std::string_view stage1) {
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < kSizePrefixBytes; ++i) u = (u << 8) | static_cast<unsigned char>(stage1[i]);
  return u;
}

}  // namespace

std::string_view armor_break(LineStyle style) { return style == LineStyle::Unix ? "=\n" : "\r\n"; }

std::string base64_encode(std::string_view data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                            (static_cast<unsigned char>(data[i + 1]) << 8) |
                            static_cast<unsigned char>(data[i + 2]);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
  }
  const std::size_t rest = data.size() - i;
  if (rest > 0) {
    std::uint32_t v = static_cast<unsigned char>(data[i]) << 16;
    if (rest == 2) v |= static_cast<unsigned char>(data[i + 1]) << 8;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(rest == 2 ? kAlphabet[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::optional<std::string> base64_decode(std::string_view code) {
  if (code.size() % 4 != 0) return std::nullopt;
  std::string out;
  out.reserve(code.size() / 4 * 3);
  for (std::size_t i = 0; i < code.size(); i += 4) {
    const bool last = i + 4 == code.size();
    int pads = 0;
    if (last) pads = (code[i + 3] == '=') + (code[i + 3] == '=' && code[i + 2] == '=');
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      int d = 0;
      if (k < 4 - pads) {
        d = kReverse[static_cast<unsigned char>(code[i + k])];
        if (d < 0) return std::nullopt;
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    // canonical form: unused low bits of the final quantum are zero
    if ((pads == 1 && (v & 0xff) != 0) || (pads == 2 && (v & 0xffff) != 0)) return std::nullopt;
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    if (pads < 2) out.push_back(static_cast<char>((v >> 8) & 0xff));
    if (pads < 1) out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

std::string armor(std::string_view stage1, LineStyle style) {
  const std::string code = base64_encode(stage1);
  const std::string_view brk = armor_break(style);
  std::string out;
  out.reserve(code.size() + (code.size() / kArmorLineBytes + 1) * kArmorBreakBytes);
  for (std::size_t i = 0; i < code.size(); i += kArmorLineBytes) {
    out.append(code, i, kArmorLineBytes);
    out.append(brk);
  }
  return out;
}

std::string dearmor(std::string_view armored) {
  constexpr std::size_t kLine = kArmorLineBytes + kArmorBreakBytes;
  const std::size_t tail = armored.size() % kLine;
  if (armored.empty() || (tail != 0 && tail <= kArmorBreakBytes)) {
    throw DecodeError(Errc::bad_base64, "armored element has an invalid length");
  }
  std::string code;
  code.reserve(armored.size());
  for (std::size_t i = 0; i < armored.size(); i += kLine) {
    const std::size_t n = std::min(kLine, armored.size() - i);
    code.append(armored.substr(i, n - kArmorBreakBytes));
  }
  auto decoded = base64_decode(code);
  if (!decoded) throw DecodeError(Errc::bad_base64, "armored element is not valid base64");
  return std::move(*decoded);
}

CompressedElement compress_element(std::string_view data, LineStyle style, int level) {
  return CompressedElement{armor(stage_one(data, level), style), data.size()};
}

std::uint64_t peek_uncompressed_size(std::string_view armored) {
  const std::string stage1 = dearmor(armored.substr(0, std::min<std::size_t>(armored.size(),
                                                                             kArmorLineBytes + kArmorBreakBytes)));
  if (stage1.size() < kSizePrefixBytes) throw DecodeError(Errc::bad_base64, "armored element too short");
  return read_size_prefix(stage1);
}

std::string decompress_element(std::string_view armored) {
  const std::string stage1 = dearmor(armored);
  if (stage1.size() < kSizePrefixBytes + 1) {
    throw DecodeError(Errc::inflate_failed, "compressed element too short");
  }
  if (stage1[kSizePrefixBytes] != kCompressionMarker) {
    throw DecodeError(Errc::missing_z_marker, "missing z marker");
  }
  const std::uint64_t u = read_size_prefix(stage1);
  std::string out =
      detail::zlib_inflate(std::string_view(stage1).substr(kSizePrefixBytes + 1), u);
  if (out.size() != u) throw DecodeError(Errc::size_mismatch, "size mismatch");
  return out;
}

}  // namespace scda

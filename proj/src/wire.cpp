#include "scda/wire.hpp"

#include "scda/error.hpp"

namespace scda {
namespace {

std::string_view fixed_break(LineStyle style) { return style == LineStyle::Unix ? "-\n" : "\r\n"; }

}  // namespace

std::string pad_fixed(std::string_view data, std::size_t width, LineStyle style) {
  if (width < 4 || data.size() > width - 4) {
    throw LengthError("string of " + std::to_string(data.size()) + " bytes does not fit a " +
                      std::to_string(width) + "-byte entry");
  }
  const std::size_t p = width - data.size();
  std::string out;
  out.reserve(width);
  out.append(data);
  out.push_back(' ');
  out.append(p - 3, '-');
  out.append(fixed_break(style));
  return out;
}

std::string_view unpad_fixed(std::string_view padded) {
  if (padded.size() < 4) throw FormatError("padded entry shorter than 4 bytes");
  std::size_t i = padded.size() - 2;
  std::size_t dashes = 0;
  while (i > 0 && padded[i - 1] == '-') {
    --i;
    ++dashes;
  }
  if (dashes == 0) throw FormatError("padding has no dashes");
  if (i == 0 || padded[i - 1] != ' ') throw FormatError("padding does not start with a space");
  return padded.substr(0, i - 1);
}

std::optional<LineStyle> fixed_pad_style(std::string_view padded) {
  if (padded.size() < 2) return std::nullopt;
  const std::string_view q = padded.substr(padded.size() - 2);
  if (q == fixed_break(LineStyle::Unix)) return LineStyle::Unix;
  if (q == fixed_break(LineStyle::Mime)) return LineStyle::Mime;
  return std::nullopt;
}

std::size_t data_pad_length(Count n) {
  const auto rem = static_cast<std::size_t>(n % kDataDivisor);
  std::size_t p = (kDataDivisor - rem) % kDataDivisor;
  if (p < kMinDataPad) p += kDataDivisor;
  return p;
}

std::string pad_data(Count n, std::optional<char> last, LineStyle style) {
  const std::size_t p = data_pad_length(n);
  const bool ends_in_newline = n > 0 && last == '\n';
  std::string out;
  out.reserve(p);
  if (ends_in_newline) {
    out.append("==");
  } else {
    out.append(style == LineStyle::Unix ? "\n=" : "\r\n");
  }
  const std::string_view tail = style == LineStyle::Unix ? "\n\n" : "\r\n\r\n";
  out.append(p - 2 - tail.size(), '=');
  out.append(tail);
  return out;
}

std::string pad_data(std::string_view data, LineStyle style) {
  return pad_data(data.size(), data.empty() ? std::nullopt : std::optional<char>(data.back()), style);
}

std::optional<LineStyle> data_pad_style(std::string_view padding, Count n, std::optional<char> last) {
  for (LineStyle s : {LineStyle::Unix, LineStyle::Mime}) {
    if (padding == pad_data(n, last, s)) return s;
  }
  return std::nullopt;
}

std::string encode_count(char letter, Count value, LineStyle style) {
  if (value > kMaxCount) throw RangeError("count exceeds 26 decimal digits");
  std::string out;
  out.reserve(kCountEntryBytes);
  out.push_back(letter);
  out.push_back(' ');
  out.append(pad_fixed(to_decimal(value), kCountEntryBytes - 2, style));
  return out;
}

Count decode_count(std::string_view entry, char expected_letter) {
  if (entry.size() != kCountEntryBytes) {
    throw FormatError("count entry is not 32 bytes", Errc::bad_count_entry);
  }
  if (entry[0] != expected_letter) {
    throw FormatError(std::string("count entry does not start with '") + expected_letter + "'",
                      Errc::bad_count_entry);
  }
  if (entry[1] != ' ') throw FormatError("count entry lacks separator", Errc::bad_count_entry);
  std::string_view digits;
  try {
    digits = unpad_fixed(entry.substr(2));
  } catch (const FormatError& e) {
    throw FormatError(std::string("count entry: ") + e.what(), Errc::bad_count_entry);
  }
  const auto value = parse_decimal(digits);
  if (!value) throw FormatError("count entry has an invalid numeral", Errc::bad_count_entry);
  return *value;
}

bool is_section_letter(char c) {
  return c == 'F' || c == 'I' || c == 'B' || c == 'A' || c == 'V';
}

std::string encode_section_header(char type, std::string_view user, LineStyle style) {
  if (!is_section_letter(type)) throw FormatError(std::string("unknown section type '") + type + "'");
  if (user.size() > kMaxUserBytes) {
    throw LengthError("user string of " + std::to_string(user.size()) + " bytes exceeds 58");
  }
  std::string out;
  out.reserve(kSectionHeaderBytes);
  out.push_back(type);
  out.push_back(' ');
  out.append(pad_fixed(user, kSectionHeaderBytes - 2, style));
  return out;
}

SectionHeader decode_section_header(std::string_view entry) {
  if (entry.size() != kSectionHeaderBytes) throw FormatError("section header is not 64 bytes");
  if (!is_section_letter(entry[0])) throw FormatError("unknown section type letter");
  if (entry[1] != ' ') throw FormatError("section header lacks separator");
  return SectionHeader{entry[0], std::string(unpad_fixed(entry.substr(2)))};
}

}  // namespace scda

#include <gtest/gtest.h>

#include <random>

#include "scda/error.hpp"
#include "scda/wire.hpp"

using namespace scda;

namespace {

constexpr LineStyle kStyles[] = {LineStyle::Unix, LineStyle::Mime};

// Padding rules written out directly from the format description.
std::string oracle_fixed(std::string_view data, std::size_t width, LineStyle style) {
  std::string out(data);
  out.push_back(' ');
  out.append(width - data.size() - 3, '-');
  out.append(style == LineStyle::Unix ? "-\n" : "\r\n");
  return out;
}

std::string oracle_data_pad(std::string_view data, LineStyle style) {
  std::size_t p = 7;
  while ((data.size() + p) % 32 != 0) ++p;
  std::string head;
  if (!data.empty() && data.back() == '\n') {
    head = "==";
  } else {
    head = style == LineStyle::Mime ? "\r\n" : "\n=";
  }
  const std::string tail = style == LineStyle::Mime ? "\r\n\r\n" : "\n\n";
  return head + std::string(p - head.size() - tail.size(), '=') + tail;
}

}  // namespace

TEST(FixedPad, MatchesOracle) {
  for (std::size_t width : {24u, 30u, 32u, 62u}) {
    for (std::size_t n = 0; n + 4 <= width; ++n) {
      const std::string data(n, 'x');
      for (auto style : kStyles) {
        EXPECT_EQ(pad_fixed(data, width, style), oracle_fixed(data, width, style));
      }
    }
  }
}

TEST(FixedPad, TooLongThrows) {
  EXPECT_THROW(pad_fixed(std::string(21, 'a'), 24, LineStyle::Unix), LengthError);
  EXPECT_NO_THROW(pad_fixed(std::string(20, 'a'), 24, LineStyle::Unix));
}

// Every string over an alphabet that collides with the padding bytes
// survives the round trip, up to length 6 at every width.
TEST(FixedPad, AdversarialSuffixesBruteForce) {
  const std::string alphabet = "- \n\r=a";
  for (std::size_t width : {24u, 30u, 62u}) {
    std::vector<std::string> layer{""};
    for (std::size_t len = 0; len <= 6; ++len) {
      std::vector<std::string> next;
      for (const auto& s : layer) {
        for (auto style : kStyles) {
          const std::string padded = pad_fixed(s, width, style);
          ASSERT_EQ(padded.size(), width);
          ASSERT_EQ(unpad_fixed(padded), s) << "width " << width;
          ASSERT_EQ(fixed_pad_style(padded), style);
        }
        for (char c : alphabet) next.push_back(s + c);
      }
      layer = std::move(next);
    }
  }
}

TEST(FixedPad, LongAdversarialStrings) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "- -\n";
  for (std::size_t width : {24u, 30u, 62u}) {
    for (int i = 0; i < 3000; ++i) {
      std::string s(rng() % (width - 3), ' ');
      for (auto& c : s) c = alphabet[rng() % alphabet.size()];
      const auto style = kStyles[rng() % 2];
      EXPECT_EQ(unpad_fixed(pad_fixed(s, width, style)), s);
    }
  }
}

TEST(FixedPad, IgnoresFinalTwoBytes) {
  std::string padded = pad_fixed("abc", 24, LineStyle::Unix);
  padded[22] = '?';
  padded[23] = '!';
  EXPECT_EQ(unpad_fixed(padded), "abc");
  EXPECT_FALSE(fixed_pad_style(padded));
}

TEST(FixedPad, RejectsMalformed) {
  EXPECT_THROW(unpad_fixed("abc"), FormatError);
  EXPECT_THROW(unpad_fixed("abc---\n"), FormatError);         // no space before dashes
  EXPECT_THROW(unpad_fixed("ab  \n\n"), FormatError);         // no dash
  EXPECT_THROW(unpad_fixed(std::string(24, 'x')), FormatError);
}

TEST(DataPad, LengthLawForAllSmallN) {
  for (Count n = 0; n <= 1000; ++n) {
    const std::size_t p = data_pad_length(n);
    EXPECT_GE(p, kMinDataPad);
    EXPECT_LE(p, kMaxDataPad);
    EXPECT_EQ((n + p) % kDataDivisor, 0u);
  }
  EXPECT_EQ(data_pad_length(0), 32u);
  EXPECT_EQ(data_pad_length(25), 7u);
  EXPECT_EQ(data_pad_length(26), 38u);
  EXPECT_EQ(data_pad_length(kMaxCount), data_pad_length(kMaxCount % 32));
}

TEST(DataPad, MatchesOracle) {
  std::mt19937_64 rng(5);
  for (std::size_t n = 0; n <= 200; ++n) {
    for (char last : {'a', '\n', '=', '\r'}) {
      std::string data(n, 'q');
      if (n > 0) data.back() = last;
      for (auto style : kStyles) {
        const std::string pad = pad_data(data, style);
        EXPECT_EQ(pad, oracle_data_pad(data, style));
        const std::optional<char> tail = n > 0 ? std::optional<char>(data.back()) : std::nullopt;
        EXPECT_EQ(pad_data(n, tail, style), pad);
        EXPECT_EQ(data_pad_style(pad, n, tail), style);
      }
    }
  }
}

TEST(DataPad, EmptyPayloadUsesLineBreakHead) {
  EXPECT_EQ(pad_data(std::string_view{}, LineStyle::Unix), "\n=" + std::string(28, '=') + "\n\n");
  EXPECT_EQ(pad_data(std::string_view{}, LineStyle::Mime), "\r\n" + std::string(26, '=') + "\r\n\r\n");
}

TEST(CountEntry, Layout) {
  EXPECT_EQ(encode_count('E', 44, LineStyle::Unix), "E 44 " + std::string(26, '-') + "\n");
  EXPECT_EQ(encode_count('N', 0, LineStyle::Mime), "N 0 " + std::string(26, '-') + "\r\n");
  EXPECT_EQ(encode_count('E', kMaxCount, LineStyle::Unix).size(), kCountEntryBytes);
  EXPECT_THROW(encode_count('E', kMaxCount + 1, LineStyle::Unix), RangeError);
}

TEST(CountEntry, RoundTrip) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    const Count v = ((Count{rng()} << 64) | rng()) % (kMaxCount + 1);
    for (auto style : kStyles) EXPECT_EQ(decode_count(encode_count('U', v, style), 'U'), v);
  }
}

TEST(CountEntry, RejectsEveryCorruption) {
  const std::string good = encode_count('E', 1234, LineStyle::Unix);
  EXPECT_THROW(decode_count(good, 'N'), FormatError);
  for (std::size_t i = 0; i < good.size() - 2; ++i) {
    std::string bad = good;
    bad[i] = 'x';
    try {
      decode_count(bad, 'E');
      ADD_FAILURE() << "accepted corruption at " << i;
    } catch (const FormatError& e) {
      EXPECT_EQ(e.code(), Errc::bad_count_entry);
    }
  }
  EXPECT_THROW(decode_count("E 0123 " + std::string(23, '-') + "\n", 'E'), FormatError);
  EXPECT_THROW(decode_count(good.substr(1), 'E'), FormatError);
}

TEST(SectionHeader, Layout) {
  const std::string h = encode_section_header('B', "user", LineStyle::Unix);
  EXPECT_EQ(h, "B user " + std::string(56, '-') + "\n");
  EXPECT_EQ(decode_section_header(h), (SectionHeader{'B', "user"}));
  EXPECT_EQ(encode_section_header('I', std::string(58, 'u'), LineStyle::Mime).size(), kSectionHeaderBytes);
  EXPECT_THROW(encode_section_header('I', std::string(59, 'u'), LineStyle::Mime), LengthError);
  EXPECT_THROW(encode_section_header('X', "", LineStyle::Mime), FormatError);
}

TEST(SectionHeader, ArbitraryUserBytes) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    std::string user(rng() % 59, '\0');
    for (auto& c : user) c = static_cast<char>(rng());
    for (char t : {'F', 'I', 'B', 'A', 'V'}) {
      EXPECT_EQ(decode_section_header(encode_section_header(t, user, kStyles[i % 2])), (SectionHeader{t, user}));
    }
  }
}

TEST(SectionHeader, RejectsBadLetterAndSeparator) {
  std::string h = encode_section_header('A', "x", LineStyle::Unix);
  h[1] = '_';
  EXPECT_THROW(decode_section_header(h), FormatError);
  h = encode_section_header('A', "x", LineStyle::Unix);
  h[0] = 'a';
  EXPECT_THROW(decode_section_header(h), FormatError);
}

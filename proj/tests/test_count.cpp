#include <gtest/gtest.h>

#include <random>

#include "scda/count.hpp"

using namespace scda;

namespace {

// Reference rendering through repeated division on 64-bit halves.
std::string oracle_decimal(Count v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

}  // namespace

TEST(Count, ZeroRendersAsSingleDigit) {
  EXPECT_EQ(to_decimal(0), "0");
  EXPECT_EQ(parse_decimal("0"), Count{0});
}

TEST(Count, MaxHas26Nines) {
  EXPECT_EQ(to_decimal(kMaxCount), std::string(26, '9'));
  EXPECT_EQ(parse_decimal(std::string(26, '9')), kMaxCount);
  EXPECT_FALSE(parse_decimal(std::string(27, '9')));
  EXPECT_FALSE(fits_u64(kMaxCount));
}

TEST(Count, MatchesStdToStringFor64BitValues) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t v = rng() >> (rng() % 64);
    EXPECT_EQ(to_decimal(v), std::to_string(v));
    EXPECT_EQ(parse_decimal(std::to_string(v)), Count{v});
  }
}

TEST(Count, RoundTripsWide) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Count v = ((Count{rng()} << 64) | rng()) % (kMaxCount + 1);
    const std::string s = to_decimal(v);
    EXPECT_EQ(s, oracle_decimal(v));
    EXPECT_EQ(parse_decimal(s), v);
  }
}

TEST(Count, RejectsMalformedNumerals) {
  for (const char* bad : {"", "00", "01", "1a", "-1", "+1", " 1", "1 ", "1.0"}) {
    EXPECT_FALSE(parse_decimal(bad)) << bad;
  }
}

TEST(Count, CheckedArithmetic) {
  EXPECT_EQ(checked_add(kMaxCount - 1, 1), kMaxCount);
  EXPECT_FALSE(checked_add(kMaxCount, 1));
  EXPECT_EQ(checked_mul(0, kMaxCount), Count{0});
  EXPECT_EQ(checked_mul(kMaxCount, 1), kMaxCount);
  EXPECT_FALSE(checked_mul(detail::pow10(13), detail::pow10(13)));
  EXPECT_EQ(checked_mul(detail::pow10(13), detail::pow10(12)), detail::pow10(25));
}

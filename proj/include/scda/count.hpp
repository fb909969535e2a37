#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace scda {

/// Counts and byte sizes as stored in the file: up to 26 decimal digits,
/// which does not fit into 64 bits.
using Count = unsigned __int128;

namespace detail {
constexpr Count pow10(int e) {
  Count v = 1;
  for (int i = 0; i < e; ++i) v *= 10;
  return v;
}
}  // namespace detail

inline constexpr int kMaxCountDigits = 26;
inline constexpr Count kMaxCount = detail::pow10(kMaxCountDigits) - 1;

inline constexpr bool fits_u64(Count c) { return c <= UINT64_MAX; }

/// Decimal rendering without leading zeros; zero renders as "0".
std::string to_decimal(Count value);

/// Parses a numeral of 1..26 digits without leading zeros ("0" is allowed).
std::optional<Count> parse_decimal(std::string_view digits);

/// Checked arithmetic against kMaxCount; nullopt on overflow.
std::optional<Count> checked_add(Count a, Count b);
std::optional<Count> checked_mul(Count a, Count b);

}  // namespace scda

#include "scda/count.hpp"

#include <algorithm>

namespace scda {

std::string to_decimal(Count value) {
  if (value == 0) return "0";
  std::string out;
  while (value != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<Count> parse_decimal(std::string_view digits) {
  if (digits.empty() || digits.size() > static_cast<std::size_t>(kMaxCountDigits)) return std::nullopt;
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  Count value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + static_cast<Count>(c - '0');
  }
  return value;
}

std::optional<Count> checked_add(Count a, Count b) {
  if (a > kMaxCount || b > kMaxCount - a) return std::nullopt;
  return a + b;
}

std::optional<Count> checked_mul(Count a, Count b) {
  if (a == 0 || b == 0) return Count{0};
  if (a > kMaxCount / b) return std::nullopt;
  return a * b;
}

}  // namespace scda

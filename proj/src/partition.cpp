#include "scda/partition.hpp"

#include "scda/error.hpp"

namespace scda {
namespace {

Count sum_counts(std::span<const std::uint64_t> counts) {
  Count total = 0;
  for (std::uint64_t c : counts) total += c;
  return total;
}

void require_total(const SectionRecord& section, std::span<const std::uint64_t> counts) {
  if (sum_counts(counts) != section.count) {
    throw ConsistencyError("partition counts sum to " + to_decimal(sum_counts(counts)) +
                           " but the section holds " + to_decimal(section.count) + " elements");
  }
}

}  // namespace

std::vector<Count> offsets(std::span<const std::uint64_t> counts) {
  std::vector<Count> out;
  out.reserve(counts.size() + 1);
  Count c = 0;
  out.push_back(c);
  for (std::uint64_t n : counts) {
    c += n;
    out.push_back(c);
  }
  return out;
}

std::vector<Count> byte_sizes_fixed(std::span<const std::uint64_t> counts, Count element_size) {
  std::vector<Count> out;
  out.reserve(counts.size());
  Count total = 0;
  for (std::uint64_t n : counts) {
    const auto s = checked_mul(n, element_size);
    if (!s) throw RangeError("rank byte size exceeds 26 decimal digits");
    const auto t = checked_add(total, *s);
    if (!t) throw RangeError("total byte size exceeds 26 decimal digits");
    total = *t;
    out.push_back(*s);
  }
  return out;
}

std::vector<Count> byte_sizes_var(std::span<const std::uint64_t> counts,
                                  std::span<const std::uint64_t> sizes) {
  if (sum_counts(counts) != sizes.size()) {
    throw LengthError("size list length does not match the partition");
  }
  std::vector<Count> out;
  out.reserve(counts.size());
  std::size_t i = 0;
  for (std::uint64_t n : counts) {
    Count s = 0;
    for (std::uint64_t k = 0; k < n; ++k) s += sizes[i++];
    out.push_back(s);
  }
  return out;
}

std::vector<RankByteWindow> tile_windows(std::uint64_t base, std::span<const std::uint64_t> counts,
                                         std::span<const Count> byte_sizes) {
  if (counts.size() != byte_sizes.size()) throw LengthError("one byte size per rank is required");
  std::vector<RankByteWindow> out;
  out.reserve(counts.size());
  Count element = 0;
  Count pos = base;
  for (std::size_t p = 0; p < counts.size(); ++p) {
    const Count end = pos + byte_sizes[p];
    if (!fits_u64(end)) throw RangeError("window beyond 64-bit file offsets");
    out.push_back(RankByteWindow{static_cast<int>(p), element, element + counts[p],
                                 static_cast<std::uint64_t>(pos),
                                 static_cast<std::uint64_t>(byte_sizes[p])});
    element += counts[p];
    pos = end;
  }
  return out;
}

std::vector<RankByteWindow> plan_windows(const SectionRecord& section,
                                         std::span<const std::uint64_t> counts) {
  require_total(section, counts);
  return tile_windows(section.payload_offset, counts, byte_sizes_fixed(counts, section.size));
}

std::vector<RankByteWindow> plan_windows(const SectionRecord& section,
                                         std::span<const std::uint64_t> counts,
                                         std::span<const Count> byte_sizes) {
  require_total(section, counts);
  return tile_windows(section.payload_offset, counts, byte_sizes);
}

std::vector<RankByteWindow> plan_size_windows(const SectionRecord& section,
                                              std::span<const std::uint64_t> counts) {
  require_total(section, counts);
  return tile_windows(section.sizes_offset, counts, byte_sizes_fixed(counts, kCountEntryBytes));
}

}  // namespace scda

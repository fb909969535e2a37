#pragma once

// Partition arithmetic: per-rank element counts, their prefix sums and the
// byte windows each rank owns inside a section.

#include <cstdint>
#include <span>
#include <vector>

#include "scda/count.hpp"
#include "scda/sections.hpp"

namespace scda {

/// C_p for p in [0, P]: C_0 = 0 and C_P = sum of all counts.
std::vector<Count> offsets(std::span<const std::uint64_t> counts);

/// S_p = N_p * E.  Throws RangeError beyond 26 digits.
std::vector<Count> byte_sizes_fixed(std::span<const std::uint64_t> counts, Count element_size);

/// S_p = sum of E_i over rank p's elements.  `sizes` is the global list.
/// Throws LengthError if its length is not the sum of counts.
std::vector<Count> byte_sizes_var(std::span<const std::uint64_t> counts,
                                  std::span<const std::uint64_t> sizes);

struct RankByteWindow {
  int rank = 0;
  Count element_begin = 0;
  Count element_end = 0;
  std::uint64_t byte_offset = 0;
  std::uint64_t byte_length = 0;

  bool operator==(const RankByteWindow&) const = default;
};

/// Windows of the given per-rank byte sizes, tiling [base, base + sum).
std::vector<RankByteWindow> tile_windows(std::uint64_t base, std::span<const std::uint64_t> counts,
                                         std::span<const Count> byte_sizes);

/// Data windows of a fixed array section.  Throws ConsistencyError unless
/// the counts sum to the section's N.
std::vector<RankByteWindow> plan_windows(const SectionRecord& section,
                                         std::span<const std::uint64_t> counts);

/// Data windows of a variable array section given per-rank byte sums (the
/// second phase, after sizes are known).
std::vector<RankByteWindow> plan_windows(const SectionRecord& section,
                                         std::span<const std::uint64_t> counts,
                                         std::span<const Count> byte_sizes);

/// Windows over a variable array's size table, 32 bytes per element (the
/// first phase).
std::vector<RankByteWindow> plan_size_windows(const SectionRecord& section,
                                              std::span<const std::uint64_t> counts);

}  // namespace scda

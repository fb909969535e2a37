#include <gtest/gtest.h>

#include <random>

#include "scda/error.hpp"
#include "scda/partition.hpp"

using namespace scda;

namespace {

using U64s = std::vector<std::uint64_t>;

SectionRecord fixed_record(std::uint64_t payload_offset, Count n, Count e) {
  SectionRecord r;
  r.kind = SectionKind::array;
  r.count = n;
  r.size = e;
  r.payload_offset = payload_offset;
  r.payload_length = static_cast<std::uint64_t>(n * e);
  return r;
}

}  // namespace

TEST(Partition, Offsets) {
  EXPECT_EQ(offsets(U64s{3, 0, 2}), (std::vector<Count>{0, 3, 3, 5}));
  EXPECT_EQ(offsets(U64s{0, 0}), (std::vector<Count>{0, 0, 0}));
  EXPECT_EQ(offsets(U64s{}), (std::vector<Count>{0}));
}

TEST(Partition, ByteSizesFixed) {
  EXPECT_EQ(byte_sizes_fixed(U64s{3, 0, 2}, 4), (std::vector<Count>{12, 0, 8}));
  EXPECT_EQ(byte_sizes_fixed(U64s{3, 0, 2}, 0), (std::vector<Count>{0, 0, 0}));
  EXPECT_THROW(byte_sizes_fixed(U64s{~std::uint64_t{0}}, kMaxCount), RangeError);
}

TEST(Partition, ByteSizesVar) {
  EXPECT_EQ(byte_sizes_var(U64s{2, 1}, U64s{1, 2, 3}), (std::vector<Count>{3, 3}));
  EXPECT_EQ(byte_sizes_var(U64s{0, 3, 0}, U64s{1, 2, 3}), (std::vector<Count>{0, 6, 0}));
  EXPECT_THROW(byte_sizes_var(U64s{2, 2}, U64s{1, 2, 3}), LengthError);
}

TEST(Partition, VarWithConstantSizesEqualsFixed) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    U64s counts(1 + rng() % 8);
    std::uint64_t n = 0;
    for (auto& c : counts) n += c = rng() % 5;
    const std::uint64_t e = rng() % 100;
    EXPECT_EQ(byte_sizes_var(counts, U64s(n, e)), byte_sizes_fixed(counts, e));
    EXPECT_EQ(offsets(counts).back(), Count{n});
  }
}

TEST(Partition, FixedWindowsExample) {
  const auto w = plan_windows(fixed_record(256, 5, 4), U64s{3, 0, 2});
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0], (RankByteWindow{0, 0, 3, 256, 12}));
  EXPECT_EQ(w[1], (RankByteWindow{1, 3, 3, 268, 0}));
  EXPECT_EQ(w[2], (RankByteWindow{2, 3, 5, 268, 8}));
}

TEST(Partition, SerialWindowCoversPayload) {
  const auto w = plan_windows(fixed_record(256, 5, 4), U64s{5});
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].byte_offset, 256u);
  EXPECT_EQ(w[0].byte_length, 20u);
}

TEST(Partition, CountSumMismatch) {
  EXPECT_THROW(plan_windows(fixed_record(256, 5, 4), U64s{2, 2}), ConsistencyError);
  EXPECT_THROW(plan_windows(fixed_record(256, 5, 4), U64s{6}), ConsistencyError);
}

TEST(Partition, VarWindowsTwoPhase) {
  SectionRecord r;
  r.kind = SectionKind::varray;
  r.count = 3;
  r.sizes_offset = 1000;
  r.payload_offset = 1096;
  const auto sizes = plan_size_windows(r, U64s{2, 1});
  EXPECT_EQ(sizes[0], (RankByteWindow{0, 0, 2, 1000, 64}));
  EXPECT_EQ(sizes[1], (RankByteWindow{1, 2, 3, 1064, 32}));
  const std::vector<Count> bytes{3, 3};
  const auto data = plan_windows(r, U64s{2, 1}, bytes);
  EXPECT_EQ(data[0], (RankByteWindow{0, 0, 2, 1096, 3}));
  EXPECT_EQ(data[1], (RankByteWindow{1, 2, 3, 1099, 3}));
}

TEST(Partition, WindowsTileThePayload) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 2000; ++i) {
    const int ranks = 1 + static_cast<int>(rng() % 8);
    U64s counts(ranks);
    std::uint64_t n = 0;
    for (auto& c : counts) n += c = rng() % 3 == 0 ? 0 : rng() % 10;
    const std::uint64_t e = rng() % 50;
    const std::uint64_t base = 128 + 32 * (rng() % 100);
    const auto w = plan_windows(fixed_record(base, n, e), counts);
    ASSERT_EQ(w.size(), counts.size());
    std::uint64_t at = base;
    Count element = 0;
    for (int p = 0; p < ranks; ++p) {
      EXPECT_EQ(w[p].rank, p);
      EXPECT_EQ(w[p].byte_offset, at);
      EXPECT_EQ(w[p].element_begin, element);
      EXPECT_EQ(w[p].byte_length, counts[p] * e);
      at += w[p].byte_length;
      element = w[p].element_end;
    }
    EXPECT_EQ(at, base + n * e);
    EXPECT_EQ(element, Count{n});
  }
}

#include <gtest/gtest.h>

#include <random>

#include "scda/error.hpp"
#include "scda/kernels.hpp"

using namespace scda;

namespace {

std::vector<std::string> random_elements(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::string> out(n);
  for (auto& e : out) {
    e.resize(rng() % 3000);
    for (auto& c : e) c = static_cast<char>(rng() % 2 ? 'a' + rng() % 4 : rng());
  }
  return out;
}

std::vector<std::string_view> views(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Kernels, ParallelCompressionMatchesSerial) {
  std::mt19937_64 rng(21);
  for (std::size_t n : {0u, 1u, 7u, 64u, 200u}) {
    const auto elements = random_elements(rng, n);
    for (auto style : {LineStyle::Unix, LineStyle::Mime}) {
      for (int level : {kStoredLevel, kBestLevel}) {
        const auto par = compress_elements(views(elements), style, level);
        const auto ser = compress_elements_serial(views(elements), style, level);
        ASSERT_EQ(par.size(), n);
        for (std::size_t i = 0; i < n; ++i) {
          EXPECT_EQ(par[i].armored, ser[i].armored);
          EXPECT_EQ(par[i].uncompressed_size, elements[i].size());
        }
      }
    }
  }
}

TEST(Kernels, ParallelDecompressionMatchesSerial) {
  std::mt19937_64 rng(22);
  const auto elements = random_elements(rng, 150);
  std::vector<std::string> armored;
  for (auto& c : compress_elements(views(elements), LineStyle::Mime, kDefaultLevel)) armored.push_back(c.armored);
  EXPECT_EQ(decompress_elements(views(armored)), elements);
  EXPECT_EQ(decompress_elements_serial(views(armored)), elements);
}

TEST(Kernels, FirstFailingIndexWins) {
  std::mt19937_64 rng(23);
  const auto elements = random_elements(rng, 100);
  std::vector<std::string> armored;
  for (auto& c : compress_elements(views(elements), LineStyle::Unix, kBestLevel)) armored.push_back(c.armored);
  armored[90] = "!!!!";
  armored[30] = armored[31];  // size mismatch unless equal lengths, checksum otherwise
  Errc serial = Errc::ok;
  Errc parallel = Errc::ok;
  std::string serial_what;
  std::string parallel_what;
  try {
    decompress_elements_serial(views(armored));
  } catch (const DecodeError& e) {
    serial = e.code();
    serial_what = e.what();
  }
  try {
    decompress_elements(views(armored));
  } catch (const DecodeError& e) {
    parallel = e.code();
    parallel_what = e.what();
  }
  EXPECT_NE(serial, Errc::ok);
  EXPECT_EQ(parallel, serial);
  EXPECT_EQ(parallel_what, serial_what);
}

TEST(Kernels, SplitFixed) {
  const auto v = split_fixed("aabbcc", 3, 2);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[2], "cc");
  EXPECT_EQ(split_fixed("", 4, 0).size(), 4u);
  EXPECT_THROW(split_fixed("aabbc", 3, 2), LengthError);
}

TEST(Kernels, SplitSizes) {
  const std::vector<std::uint64_t> sizes{1, 0, 3};
  const auto v = split_sizes("abcd", sizes);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], "a");
  EXPECT_EQ(v[1], "");
  EXPECT_EQ(v[2], "bcd");
  EXPECT_THROW(split_sizes("abc", sizes), LengthError);
  const std::vector<Count> wide{2, 2};
  EXPECT_EQ(split_sizes("abcd", wide)[1], "cd");
}

TEST(Kernels, ThreadCountIsPositive) { EXPECT_GE(kernel_threads(), 1); }

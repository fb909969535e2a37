#include <gtest/gtest.h>

#include "scda/compress.hpp"
#include "scda/validate.hpp"
#include "support.hpp"

using namespace scda;

namespace {

ValidationReport check(const std::string& bytes, bool strict = false) {
  StringSource src(bytes);
  return validate(src, strict);
}

const std::string& three() {
  static const std::string bytes = test::slurp(test::golden("three_sections.scda"));
  return bytes;
}

std::string compressed_file(LineStyle style) {
  const auto b = wrap_compressed_block("blk", "some block data", style);
  const auto v = wrap_compressed_array_var("var", std::vector<Count>{2, 0, 3}, "abcde", style);
  return encode_file_header({kFormatVersion, "v", "u"}, style) + encode_section(b.meta, style) +
         encode_section(b.data, style) + encode_section(v.meta, style) + encode_section(v.data, style);
}

}  // namespace

TEST(Validate, GoldenFilesAreValid) {
  for (const char* name : {"header_only.scda", "three_sections.scda", "compressed_block_stored.scda"}) {
    const auto r = check(test::slurp(test::golden(name)), true);
    EXPECT_TRUE(r.valid()) << name << " " << r.violation->reason;
    EXPECT_EQ(r.style, LineStyle::Unix);
  }
  const auto mime = check(test::slurp(test::golden("four_sections_mime.scda")), true);
  EXPECT_TRUE(mime.valid());
  EXPECT_EQ(mime.style, LineStyle::Mime);
  EXPECT_EQ(mime.sections, 4u);
  EXPECT_EQ(check(three()).sections, 3u);
}

TEST(Validate, EmptyFile) {
  const auto r = check("");
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.violation->offset, 0u);
}

TEST(Validate, TrailingByteAtFinalOffset) {
  const auto r = check(three() + "x");
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.violation->code, Errc::trailing_bytes);
  EXPECT_EQ(r.violation->offset, three().size());
}

TEST(Validate, CountEntryFlipIsReportedInsideTheEntry) {
  // N entry of the variable array section.
  const std::uint64_t entry = 384 + 64;
  for (std::uint64_t i = 0; i < 30; ++i) {
    std::string bytes = three();
    bytes[entry + i] = '#';
    const auto r = check(bytes);
    ASSERT_FALSE(r.valid()) << i;
    EXPECT_GE(r.violation->offset, entry) << i;
    EXPECT_LT(r.violation->offset, entry + 32) << i;
  }
}

TEST(Validate, MagicAndVendorOffsets) {
  std::string bytes = three();
  bytes[3] = 'X';
  EXPECT_EQ(check(bytes).violation->offset, 0u);
  bytes = three();
  bytes[21] = 'X';
  EXPECT_EQ(check(bytes).violation->offset, 8u);
  bytes = three();
  bytes[32] = 'X';
  EXPECT_EQ(check(bytes).violation->offset, 32u);
}

// The last count entry read before the end of file is blamed.
TEST(Validate, TruncationBlamesTheCountEntry) {
  const std::string bytes = three().substr(0, three().size() - 1);
  const auto r = check(bytes);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.violation->code, Errc::truncated);
  EXPECT_EQ(r.violation->offset, 384u + 96u + 3u * 32u);
  const auto block = check(three().substr(0, 300));
  EXPECT_EQ(block.violation->offset, 224u + 64u);
}

TEST(Validate, LenientIgnoresBreakBytesStrictDoesNot) {
  std::string bytes = three();
  bytes[128 + 63] = '#';
  EXPECT_TRUE(check(bytes).valid());
  const auto r = check(bytes, true);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.violation->offset, 128u);
}

TEST(Validate, StrictRejectsMixedStyles) {
  const std::string bytes = encode_file_header({kFormatVersion, "v", "u"}, LineStyle::Unix) +
                            encode_block("b", "x", LineStyle::Mime);
  EXPECT_TRUE(check(bytes).valid());
  const auto r = check(bytes, true);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.violation->offset, 128u);
}

TEST(Validate, StrictChecksWrappers) {
  for (auto style : {LineStyle::Unix, LineStyle::Mime}) {
    EXPECT_TRUE(check(compressed_file(style), true).valid());
  }
  const std::string bytes = encode_file_header({kFormatVersion, "v", "u"}, LineStyle::Unix) +
                            encode_inline("B compressed scda 00", encode_count('U', 3, LineStyle::Unix),
                                          LineStyle::Unix) +
                            encode_inline("", std::string(32, 'x'), LineStyle::Unix);
  EXPECT_TRUE(check(bytes).valid());
  const auto r = check(bytes, true);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.violation->code, Errc::nonconforming_wrapper);
}

TEST(Validate, StrictDecodesEveryElement) {
  const std::string good = compressed_file(LineStyle::Unix);
  StringSource src(good);
  const FileIndex index = index_file(src);
  const std::uint64_t element = index.sections[3].payload_offset;
  std::string bytes = good;
  bytes[element + 2] = bytes[element + 2] == 'A' ? 'B' : 'A';
  EXPECT_TRUE(check(bytes).valid());
  const auto r = check(bytes, true);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(group_of(r.violation->code), ErrorGroup::corrupt_contents);
  EXPECT_EQ(r.violation->offset, element);
}

TEST(Validate, EverySingleByteFlipIsHandled) {
  const std::string& good = three();
  StringSource gsrc(good);
  for (std::size_t i = 0; i < good.size(); ++i) {
    for (unsigned char mask : {0x01, 0x20, 0x80}) {
      std::string bytes = good;
      bytes[i] = static_cast<char>(bytes[i] ^ mask);
      StringSource src(bytes);
      bool parsed = true;
      try {
        index_file(src);
      } catch (const Error&) {
        parsed = false;
      }
      const auto r = validate(src, false);
      EXPECT_EQ(r.valid(), parsed) << i;
      if (!r.valid()) {
        EXPECT_LE(r.violation->offset, bytes.size()) << i;
        EXPECT_NE(r.violation->code, Errc::ok);
      }
    }
  }
}

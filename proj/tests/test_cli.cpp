#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "manifest.hpp"
#include "support.hpp"

using namespace scda;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult scda_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void put(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

// I + B + A + V manifest with payload files in `dir`.
fs::path four_section_manifest(const fs::path& dir) {
  put(dir / "block.bin", "block\nbytes\x01\x02");
  put(dir / "fixed.bin", "aaaabbbbcccc");
  put(dir / "var.bin", "xyyzzz");
  put(dir / "m.txt",
      "# test manifest\n"
      "F \"file user\"\n"
      "I \"inline\" text=0123456789abcdefghijklmnopqrstuv\n"
      "B \"blk\\x00\" data=block.bin\n"
      "\n"
      "A \"fixed\" N=3 E=4 data=fixed.bin\n"
      "V \"var\" sizes=1,2,0,3 data=var.bin encode=no\n");
  return dir / "m.txt";
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(scda_run({}).code, cli::kExitInvalid);
  EXPECT_EQ(scda_run({"bogus"}).code, cli::kExitInvalid);
  EXPECT_EQ(scda_run({"info"}).code, cli::kExitInvalid);
}

TEST(Cli, MissingFileExitsTwo) {
  const CliResult r = scda_run({"info", "/nonexistent-dir/x.scda"});
  EXPECT_EQ(r.code, cli::kExitIo);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(scda_run({"validate", "/nonexistent-dir/x.scda"}).code, cli::kExitIo);
}

TEST(Cli, InfoHeaderOnly) {
  const CliResult r = scda_run({"info", test::golden("header_only.scda").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0 sections"), std::string::npos);
  EXPECT_NE(r.out.find("user \"hello\""), std::string::npos);
}

TEST(Cli, InfoCompressedBlock) {
  const std::string path = test::golden("compressed_block_stored.scda").string();
  const CliResult raw = scda_run({"info", path});
  EXPECT_NE(raw.out.find("2 sections"), std::string::npos);
  EXPECT_NE(raw.out.find("0: I \"B compressed scda 00\""), std::string::npos);
  EXPECT_NE(raw.out.find("1: B"), std::string::npos);
  const CliResult dec = scda_run({"info", "--decode", path});
  EXPECT_NE(dec.out.find("1 section\n"), std::string::npos);
  EXPECT_NE(dec.out.find("0: B (compressed)"), std::string::npos);
  EXPECT_NE(dec.out.find("E=44"), std::string::npos);
}

TEST(Cli, JsonIsStable) {
  const std::string path = test::golden("three_sections.scda").string();
  const CliResult a = scda_run({"info", "--json", path});
  const CliResult b = scda_run({"info", "--json", path});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.front(), '{');
}

TEST(Cli, ValidateReportsOffset) {
  const auto dir = test::scratch_dir("cli_validate");
  std::string bytes = test::slurp(test::golden("three_sections.scda"));
  EXPECT_EQ(scda_run({"validate", "--strict", test::golden("three_sections.scda").string()}).code, 0);
  bytes += "x";
  put(dir / "bad.scda", bytes);
  const CliResult r = scda_run({"validate", (dir / "bad.scda").string()});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.out.find("invalid at byte " + std::to_string(bytes.size() - 1)), std::string::npos) << r.out;
}

TEST(Cli, CreateValidateInfoExtractRoundTrip) {
  for (bool encode : {false, true}) {
    for (const char* style : {"unix", "mime"}) {
      const auto dir = test::scratch_dir(std::string("cli_round_") + style + (encode ? "_z" : ""));
      const fs::path manifest = four_section_manifest(dir);
      std::vector<std::string> args{"create", manifest.string(), "-o", (dir / "out.scda").string(), "--style", style};
      if (encode) args.push_back("--encode");
      const CliResult c = scda_run(args);
      ASSERT_EQ(c.code, 0) << c.err;
      EXPECT_EQ(scda_run({"validate", "--strict", (dir / "out.scda").string()}).code, 0);

      const CliResult info = scda_run({"info", "--decode", (dir / "out.scda").string()});
      EXPECT_NE(info.out.find("4 sections"), std::string::npos) << info.out;
      EXPECT_NE(info.out.find("user \"file user\""), std::string::npos);
      EXPECT_NE(info.out.find("\"blk\\x00\""), std::string::npos) << info.out;
      if (encode) EXPECT_NE(info.out.find("(compressed)"), std::string::npos);

      const auto ex = [&](const std::string& index) {
        const fs::path out = dir / ("x" + index);
        const CliResult r = scda_run({"extract", "--decode", (dir / "out.scda").string(), index, "-o", out.string()});
        EXPECT_EQ(r.code, 0) << r.err;
        return out;
      };
      EXPECT_EQ(test::slurp(ex("0") / "section_0.bin"), "0123456789abcdefghijklmnopqrstuv");
      EXPECT_EQ(test::slurp(ex("1") / "section_1.bin"), test::slurp(dir / "block.bin"));
      EXPECT_EQ(test::slurp(ex("2") / "section_2.bin"), "aaaabbbbcccc");
      const fs::path v = ex("3");
      EXPECT_EQ(test::slurp(v / "elem_0.bin"), "x");
      EXPECT_EQ(test::slurp(v / "elem_1.bin"), "yy");
      EXPECT_EQ(test::slurp(v / "elem_2.bin"), "");
      EXPECT_EQ(test::slurp(v / "elem_3.bin"), "zzz");

      const CliResult bad = scda_run({"extract", (dir / "out.scda").string(), "9", "-o", (dir / "y").string()});
      EXPECT_EQ(bad.code, cli::kExitInvalid);
    }
  }
}

TEST(Cli, ManifestErrorsNameTheLine) {
  const auto dir = test::scratch_dir("cli_manifest");
  put(dir / "fixed.bin", "aaaabbbbccc");
  put(dir / "m.txt", "F \"u\"\nA \"a\" N=3 E=4 data=fixed.bin\n");
  const CliResult r = scda_run({"create", (dir / "m.txt").string(), "-o", (dir / "o.scda").string()});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;

  const auto fails_at = [&](const std::string& text, std::size_t line) {
    try {
      cli::parse_manifest(text, dir);
      ADD_FAILURE() << text;
    } catch (const cli::ManifestError& e) {
      EXPECT_EQ(e.line, line) << text << ": " << e.what();
    }
  };
  fails_at("I \"x\" text=0123456789abcdefghijklmnopqrstuv\nF \"late\"\n", 2);
  fails_at("F \"\"\nF \"\"\n", 2);
  fails_at("F \"u\"\nI \"x\" text=short\n", 2);
  fails_at("F \"u\"\n\nB \"x\" data=missing.bin\n", 3);
  fails_at("F \"u\"\nB \"unterminated text=a\n", 2);
  fails_at("F \"u\"\nB \"x\" text=a encode=maybe\n", 2);
  fails_at("F \"u\"\nV \"x\" sizes=1,2 data=fixed.bin\n", 2);
  fails_at("F \"u\"\nX \"x\"\n", 2);
  fails_at("F \"u\"\nF \"again\"\n", 2);
}

TEST(Cli, ManifestParsesKeys) {
  const auto dir = test::scratch_dir("cli_manifest_ok");
  put(dir / "v.bin", "abc");
  const auto m = cli::parse_manifest(
      "F \"u\\\"q\"\nB \"b\" text=hi\\x20there encode=yes\nV \"v\" sizes=3 data=v.bin\n", dir);
  EXPECT_EQ(m.user, "u\"q");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].data, "hi there");
  EXPECT_EQ(m.entries[0].encode, true);
  EXPECT_EQ(m.entries[1].sizes, (std::vector<std::uint64_t>{3}));
  EXPECT_FALSE(m.entries[1].encode);
}

TEST(Cli, EscapeRoundTrip) {
  std::string all;
  for (int c = 0; c < 256; ++c) all.push_back(static_cast<char>(c));
  const std::string e = cli::escape(all);
  for (unsigned char c : e) EXPECT_TRUE(c >= 32 && c < 127);
  EXPECT_EQ(cli::unescape(e), all);
  EXPECT_EQ(cli::unescape("a\\n\\t"), "a\n\t");
  EXPECT_THROW(cli::unescape("\\x4"), std::invalid_argument);
  EXPECT_THROW(cli::unescape("\\q"), std::invalid_argument);
}

TEST(Cli, SelftestSmall) {
  const CliResult a = scda_run({"selftest", "--cases", "5", "--max-ranks", "4", "--seed", "17"});
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_NE(a.out.find("PASS"), std::string::npos);
  const CliResult b = scda_run({"selftest", "--cases", "5", "--max-ranks", "4", "--seed", "17"});
  EXPECT_EQ(a.out, b.out);
}

#include <gtest/gtest.h>

#include "scda/error.hpp"
#include "scda/storage.hpp"
#include "support.hpp"

using namespace scda;

namespace {

void exercise(Medium& medium) {
  auto w = medium.open(AccessMode::write, true);
  w->write_at(4, "world");
  w->write_at(0, "helo");
  w->flush();
  w->close();
  auto r = medium.open(AccessMode::read, false);
  EXPECT_EQ(r->size(), 9u);
  StorageSource src(*r);
  EXPECT_EQ(src.read(0, 9), "heloworld");
  std::string out(3, '\0');
  EXPECT_THROW(r->read_at(8, out), FormatError);
  r->close();
}

}  // namespace

TEST(Storage, Memory) {
  MemoryMedium m;
  exercise(m);
  EXPECT_EQ(m.contents(), "heloworld");
}

TEST(Storage, MemoryCreateTruncates) {
  MemoryMedium m("old contents");
  m.open(AccessMode::write, true)->close();
  EXPECT_EQ(m.contents(), "");
}

TEST(Storage, Disk) {
  const auto dir = test::scratch_dir("storage");
  DiskMedium m(dir / "f.scda");
  exercise(m);
  EXPECT_EQ(test::slurp(dir / "f.scda"), "heloworld");
}

TEST(Storage, DiskOpenFailure) {
  DiskMedium m("/nonexistent-dir/x.scda");
  try {
    m.open(AccessMode::read, false);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.code(), Errc::fs_open);
  }
}

TEST(Storage, TruncatedReadIsCorruptNotIo) {
  const auto dir = test::scratch_dir("storage_trunc");
  DiskMedium m(dir / "f");
  m.open(AccessMode::write, true)->write_at(0, "abc");
  auto r = m.open(AccessMode::read, false);
  std::string out(4, '\0');
  try {
    r->read_at(0, out);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), Errc::truncated);
  }
}

TEST(Storage, FaultFiresOnceOnTheChosenOperation) {
  auto inner = std::make_shared<MemoryMedium>();
  FaultyMedium faulty(inner, StorageOp::write, 1);
  auto w = faulty.open(AccessMode::write, true);
  EXPECT_NO_THROW(w->write_at(0, "a"));
  EXPECT_FALSE(faulty.fired());
  try {
    w->write_at(1, "b");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.code(), Errc::fs_write);
  }
  EXPECT_TRUE(faulty.fired());
  EXPECT_NO_THROW(w->write_at(2, "c"));
}

TEST(Storage, EachOperationKindCanFail) {
  const std::pair<StorageOp, Errc> cases[] = {{StorageOp::open, Errc::fs_open},
                                              {StorageOp::read, Errc::fs_read},
                                              {StorageOp::flush, Errc::fs_flush},
                                              {StorageOp::close, Errc::fs_close}};
  for (auto [op, code] : cases) {
    auto inner = std::make_shared<MemoryMedium>("0123456789");
    FaultyMedium faulty(inner, op, 0);
    try {
      auto s = faulty.open(AccessMode::read, false);
      std::string out(2, '\0');
      s->read_at(0, out);
      s->flush();
      s->close();
      FAIL();
    } catch (const IoError& e) {
      EXPECT_EQ(e.code(), code);
    }
  }
}

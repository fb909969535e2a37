#include <gtest/gtest.h>

#include <atomic>
#include <mutex>

#include "scda/comm.hpp"

using namespace scda;

TEST(Comm, AllgatherInRankOrder) {
  for (auto schedule : {Schedule::threads, Schedule::round_robin}) {
    World world(5, schedule, 3);
    world.run([](Comm& c) {
      const auto all = c.allgather(std::string(c.rank(), 'x'));
      ASSERT_EQ(all.size(), 5u);
      for (int p = 0; p < 5; ++p) EXPECT_EQ(all[p], std::string(p, 'x'));
    });
  }
}

TEST(Comm, BcastAndValues) {
  World world(4, Schedule::threads);
  world.run([](Comm& c) {
    EXPECT_EQ(c.bcast(c.rank() == 2 ? "root" : "other", 2), "root");
    const auto v = c.allgather_value<std::uint64_t>(c.rank() * 10u);
    EXPECT_EQ(v, (std::vector<std::uint64_t>{0, 10, 20, 30}));
    c.barrier();
  });
}

TEST(Comm, SingleRank) {
  World world(1);
  int calls = 0;
  world.run([&](Comm& c) {
    EXPECT_EQ(c.size(), 1);
    EXPECT_EQ(c.allgather("a"), std::vector<std::string>{"a"});
    ++calls;
  });
  EXPECT_EQ(calls, 1);
}

TEST(Comm, RoundRobinRunsOneRankAtATime) {
  World world(6, Schedule::round_robin, 11);
  std::atomic<int> active{0};
  std::atomic<int> overlap{0};
  world.run([&](Comm& c) {
    for (int i = 0; i < 20; ++i) {
      if (active.fetch_add(1) != 0) overlap.fetch_add(1);
      active.fetch_sub(1);
      c.barrier();
    }
  });
  EXPECT_EQ(overlap.load(), 0);
}

TEST(Comm, RoundRobinOrderIsSeeded) {
  const auto trace = [](std::uint64_t seed) {
    std::vector<int> order;
    std::mutex m;
    World world(4, Schedule::round_robin, seed);
    world.run([&](Comm& c) {
      for (int i = 0; i < 10; ++i) {
        {
          std::lock_guard lock(m);
          order.push_back(c.rank());
        }
        c.barrier();
      }
    });
    return order;
  };
  EXPECT_EQ(trace(5), trace(5));
  bool differs = false;
  for (std::uint64_t s = 6; s < 20 && !differs; ++s) differs = trace(s) != trace(5);
  EXPECT_TRUE(differs);
}

TEST(Comm, LowestRankExceptionIsRethrown) {
  for (auto schedule : {Schedule::threads, Schedule::round_robin}) {
    World world(4, schedule);
    try {
      world.run([](Comm& c) {
        if (c.rank() == 1 || c.rank() == 3) throw std::runtime_error("rank " + std::to_string(c.rank()));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "rank 1");
    }
  }
}

TEST(Comm, LeavingRankAbortsCollectives) {
  for (auto schedule : {Schedule::threads, Schedule::round_robin}) {
    World world(3, schedule);
    std::atomic<int> aborted{0};
    world.run([&](Comm& c) {
      if (c.rank() == 0) return;
      try {
        c.barrier();
      } catch (const CollectiveAborted&) {
        aborted.fetch_add(1);
      }
    });
    EXPECT_EQ(aborted.load(), 2);
  }
}

TEST(Comm, WorldIsReusable) {
  World world(3, Schedule::round_robin, 1);
  for (int i = 0; i < 3; ++i) {
    world.run([](Comm& c) { EXPECT_EQ(c.allgather("z").size(), 3u); });
  }
}

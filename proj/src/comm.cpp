#include "scda/comm.hpp"

#include <condition_variable>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace scda {
namespace detail {

class Rendezvous {
 public:
  Rendezvous(int size, Schedule schedule, std::uint64_t seed)
      : size_(size),
        schedule_(schedule),
        rng_(seed),
        slots_(static_cast<std::size_t>(size)),
        waiting_(static_cast<std::size_t>(size), false),
        done_(static_cast<std::size_t>(size), false) {}

  // Blocks until this rank holds the baton (round-robin only).
  void enter(int rank) {
    std::unique_lock lock(mutex_);
    if (schedule_ == Schedule::round_robin) {
      if (holder_ < 0) holder_ = pick_runnable();
      cv_.wait(lock, [&] { return holder_ == rank; });
    }
  }

  void leave(int rank) {
    std::unique_lock lock(mutex_);
    done_[static_cast<std::size_t>(rank)] = true;
    ++finished_;
    if (arrived_ > 0) aborted_ = true;
    if (schedule_ == Schedule::round_robin && holder_ == rank) holder_ = pick_runnable();
    cv_.notify_all();
  }

  std::vector<std::string> exchange(int rank, std::string contribution) {
    std::unique_lock lock(mutex_);
    if (finished_ > 0 || aborted_) {
      aborted_ = true;
      cv_.notify_all();
      throw CollectiveAborted();
    }
    slots_[static_cast<std::size_t>(rank)] = std::move(contribution);
    waiting_[static_cast<std::size_t>(rank)] = true;
    const std::uint64_t generation = generation_;
    if (++arrived_ == size_) {
      result_ = std::make_shared<const std::vector<std::string>>(std::move(slots_));
      slots_.assign(static_cast<std::size_t>(size_), std::string());
      waiting_.assign(static_cast<std::size_t>(size_), false);
      arrived_ = 0;
      ++generation_;
    }
    if (schedule_ == Schedule::round_robin) {
      holder_ = pick_runnable();
      cv_.notify_all();
      cv_.wait(lock, [&] { return (generation_ != generation || aborted_) && holder_ == rank; });
    } else {
      cv_.notify_all();
      cv_.wait(lock, [&] { return generation_ != generation || aborted_; });
    }
    if (generation_ == generation) {
      waiting_[static_cast<std::size_t>(rank)] = false;
      throw CollectiveAborted();
    }
    auto result = result_;
    lock.unlock();
    if (schedule_ == Schedule::threads && (rng_next(rank) & 3) == 0) std::this_thread::yield();
    return *result;
  }

 private:
  // Chooses the next rank to run among those not parked in an incomplete
  // collective.  Called with the lock held.
  int pick_runnable() {
    std::vector<int> candidates;
    for (int r = 0; r < size_; ++r) {
      const auto k = static_cast<std::size_t>(r);
      if (!done_[k] && (!waiting_[k] || aborted_)) candidates.push_back(r);
    }
    if (candidates.empty()) {
      // everyone alive is parked: abort them so they can observe it
      for (int r = 0; r < size_; ++r) {
        if (!done_[static_cast<std::size_t>(r)]) candidates.push_back(r);
      }
      if (candidates.empty()) return -1;
      if (arrived_ > 0) aborted_ = true;
    }
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng_)];
  }

  std::uint64_t rng_next(int rank) {
    std::lock_guard lock(mutex_);
    return rng_() + static_cast<std::uint64_t>(rank);
  }

  const int size_;
  const Schedule schedule_;
  std::mt19937_64 rng_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<std::string> slots_;
  std::vector<bool> waiting_;
  std::vector<bool> done_;
  std::shared_ptr<const std::vector<std::string>> result_;
  int arrived_ = 0;
  int finished_ = 0;
  bool aborted_ = false;
  std::uint64_t generation_ = 0;
  int holder_ = -1;
};

}  // namespace detail

std::vector<std::string> Comm::allgather(std::string contribution) {
  return rv_->exchange(rank_, std::move(contribution));
}

void Comm::barrier() { allgather(std::string()); }

std::string Comm::bcast(std::string value, int root) {
  auto all = allgather(rank_ == root ? std::move(value) : std::string());
  return std::move(all.at(static_cast<std::size_t>(root)));
}

World::World(int size, Schedule schedule, std::uint64_t seed)
    : size_(size), schedule_(schedule), seed_(seed) {
  if (size < 1) throw Error(Errc::invalid_argument, "a world needs at least one rank");
}

World::~World() = default;

void World::run(const std::function<void(Comm&)>& body) {
  detail::Rendezvous rv(size_, schedule_, seed_);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(size_));
  auto rank_main = [&](int rank) {
    Comm comm(&rv, rank, size_);
    try {
      rv.enter(rank);
      body(comm);
    } catch (...) {
      errors[static_cast<std::size_t>(rank)] = std::current_exception();
    }
    rv.leave(rank);
  };
  if (size_ == 1) {
    rank_main(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(size_));
    for (int r = 0; r < size_; ++r) threads.emplace_back(rank_main, r);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace scda

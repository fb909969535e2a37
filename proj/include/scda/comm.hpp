#pragma once

// In-process stand-in for an MPI communicator.  Each virtual rank runs on
// its own thread; collectives are rendezvous points.  In round-robin mode
// only one rank executes at a time and a seeded generator picks who runs
// next after every collective, which makes interleavings reproducible.

#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "scda/error.hpp"

namespace scda {

enum class Schedule { threads, round_robin };

namespace detail {
class Rendezvous;
}

/// Thrown from a collective that can never complete because another rank
/// has already left World::run.
class CollectiveAborted : public Error {
 public:
  CollectiveAborted() : Error(Errc::collective_aborted, "a rank left before a collective call") {}
};

/// Per-rank handle passed to the body of World::run.
class Comm {
 public:
  int rank() const { return rank_; }
  int size() const { return size_; }

  /// Every rank contributes one string and receives all of them in rank
  /// order.
  std::vector<std::string> allgather(std::string contribution);
  void barrier();
  std::string bcast(std::string value, int root);

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  std::vector<T> allgather_value(const T& value) {
    std::string bytes(sizeof(T), '\0');
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::vector<T> out;
    for (const std::string& s : allgather(std::move(bytes))) {
      T v;
      std::memcpy(&v, s.data(), sizeof(T));
      out.push_back(v);
    }
    return out;
  }

 private:
  friend class World;
  Comm(detail::Rendezvous* rv, int rank, int size) : rv_(rv), rank_(rank), size_(size) {}

  detail::Rendezvous* rv_;
  int rank_;
  int size_;
};

class World {
 public:
  explicit World(int size, Schedule schedule = Schedule::threads, std::uint64_t seed = 0);
  ~World();
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  int size() const { return size_; }

  /// Runs `body` on all ranks and joins them.  If bodies throw, the
  /// exception of the lowest such rank is rethrown after all have finished.
  void run(const std::function<void(Comm&)>& body);

 private:
  int size_;
  Schedule schedule_;
  std::uint64_t seed_;
};

}  // namespace scda

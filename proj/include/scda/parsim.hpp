#pragma once

// Virtual-rank harness: replays a script of section writes on P simulated
// ranks and reads files back under arbitrary partitions.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scda/comm.hpp"
#include "scda/file.hpp"
#include "scda/sections.hpp"
#include "scda/storage.hpp"

namespace scda::parsim {

using Partition = std::vector<std::uint64_t>;

struct Step {
  SectionKind kind = SectionKind::inline_data;
  std::string user;
  std::string data;                   // I and B payload
  std::uint64_t element_size = 0;     // A
  std::vector<std::string> elements;  // A and V
  bool encode = false;
  int root = 0;                       // I and B; taken modulo P

  std::uint64_t count() const { return elements.size(); }
  bool is_array() const { return kind == SectionKind::array || kind == SectionKind::varray; }
};

struct Script {
  std::string user;
  std::vector<Step> steps;
};

struct FaultPlan {
  enum class Kind { none, io_failure, truncation, divergence };
  Kind kind = Kind::none;
  // divergence: API call index (0 is open, k is step k) and rank whose
  // collective parameters are perturbed.
  std::size_t call = 0;
  int rank = 0;
  // io_failure: the `trigger`-th storage operation of kind `op` fails.
  StorageOp op = StorageOp::write;
  std::uint64_t trigger = 0;
  // truncation: file image length seen by the reader.
  std::uint64_t length = 0;
};

struct RunConfig {
  FileOptions options;
  Schedule schedule = Schedule::round_robin;
  std::uint64_t seed = 0;
  FaultPlan fault;
};

struct Outcome {
  std::string bytes;
  std::vector<Status> statuses;    // final status per rank
  std::vector<bool> open_after;    // whether the rank's context survived

  bool ok() const;
  /// First failing rank's status, or ok.
  Status first_error() const;
};

/// Executes `script` with P ranks; `partitions` has one entry per step
/// (ignored for I and B steps).
Outcome execute(const Script& script, int ranks, const std::vector<Partition>& partitions,
                const RunConfig& config);

/// P = 1.  Throws Error with the first failing call's code.
std::string run_serial(const Script& script, const FileOptions& options = {});
/// Throws Error with the first failing rank's code.
std::string run_parallel(const Script& script, int ranks, const std::vector<Partition>& partitions,
                         const RunConfig& config);

struct ReadConfig {
  bool decode = false;
  std::uint64_t seed = 0;          // read partitions and buffer layouts
  bool skip = false;               // all ranks skip the data
  Schedule schedule = Schedule::round_robin;
  FaultPlan fault;                 // truncation or io_failure
};

struct ReadSection {
  Section section;
  bool decoded = false;
};

struct ReadOutcome {
  std::string user;
  std::vector<ReadSection> sections;
  std::vector<Status> statuses;
  std::vector<bool> open_after;

  bool ok() const;
  Status first_error() const;
};

/// Reads every section of `bytes` with P ranks, each under a random read
/// partition, and reassembles the global payloads.
ReadOutcome read_back(const std::string& bytes, int ranks, const ReadConfig& config);

/// Sections a reader must observe for `script`: the logical sections when
/// decoding, the raw wrapper pairs otherwise.
std::vector<ReadSection> expected_sections(const Script& script, bool decode, const FileOptions& options);

/// Reads `bytes` back and compares against `script`.  Returns an empty
/// string on success, else a description of the first difference.
std::string run_read_check(const std::string& bytes, const Script& script, int ranks,
                           const ReadConfig& config, const FileOptions& options = {});

/// Splits n elements over P ranks at random cut points; empty ranks occur.
Partition random_partition(std::uint64_t n, int ranks, std::mt19937_64& rng);
std::vector<Partition> random_partitions(const Script& script, int ranks, std::mt19937_64& rng);

struct ScriptShape {
  std::size_t max_steps = 6;
  std::size_t max_elements = 24;
  std::size_t max_bytes = 160;
  bool ascii = false;   // printable ASCII user strings and payloads
  bool allow_encode = true;
};

Script random_script(std::mt19937_64& rng, const ScriptShape& shape = {});

struct SuiteReport {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;   // with replay seeds
};

/// Fuzz suites run by `scda selftest`: serial equivalence, read-back and
/// fault injection.  Case i uses seed `seed + i`.
SuiteReport fuzz_partition_independence(std::size_t cases, int max_ranks, std::uint64_t seed,
                                        std::size_t schedules = 3);
SuiteReport fuzz_read_back(std::size_t cases, int max_ranks, std::uint64_t seed);
SuiteReport fuzz_faults(std::size_t cases, int max_ranks, std::uint64_t seed);

}  // namespace scda::parsim

#include "scda/parsim.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "pack.hpp"
#include "scda/compress.hpp"

namespace scda::parsim {
namespace {

using detail::Packer;
using detail::Unpacker;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 29;
  return x;
}

void perturb(std::string& user) {
  if (user.size() < kMaxUserBytes) {
    user.push_back('~');
  } else {
    user.back() = static_cast<char>(user.back() ^ 1);
  }
}

std::uint64_t prefix(const Partition& counts, int p) {
  return std::accumulate(counts.begin(), counts.begin() + p, std::uint64_t{0});
}

bool all_ok(const std::vector<Status>& statuses) {
  return std::all_of(statuses.begin(), statuses.end(), [](const Status& s) { return s.ok(); });
}

Status first_failure(const std::vector<Status>& statuses) {
  for (const auto& s : statuses) {
    if (!s.ok()) return s;
  }
  return {};
}

std::shared_ptr<Medium> with_fault(std::shared_ptr<Medium> medium, const FaultPlan& fault) {
  if (fault.kind != FaultPlan::Kind::io_failure) return medium;
  return std::make_shared<FaultyMedium>(std::move(medium), fault.op, fault.trigger);
}

// Rank-local inputs of one array step.  Owns the bytes that the views in
// `input` point to.
struct LocalArray {
  std::string flat;
  std::vector<std::string_view> list;
  std::vector<std::uint64_t> sizes;
  ArrayInput input;
};

LocalArray local_array(const Step& step, const Partition& counts, int rank, bool indirect) {
  LocalArray out;
  const std::uint64_t first = prefix(counts, rank);
  const std::uint64_t n = counts[static_cast<std::size_t>(rank)];
  for (std::uint64_t i = first; i < first + n; ++i) {
    const std::string& e = step.elements[static_cast<std::size_t>(i)];
    out.sizes.push_back(e.size());
    out.list.emplace_back(e);
    out.flat.append(e);
  }
  if (indirect) {
    out.input = std::span<const std::string_view>(out.list);
  } else {
    out.input = std::string_view(out.flat);
  }
  return out;
}

Status write_step(File& f, const Comm& comm, const Step& step, const Partition& counts, bool diverge,
                  std::mt19937_64& rng) {
  std::string user = step.user;
  if (diverge) perturb(user);
  const int root = step.root % comm.size();
  const bool is_root = comm.rank() == root;
  switch (step.kind) {
    case SectionKind::inline_data:
      return f.write_inline(is_root ? std::string_view(step.data) : std::string_view(), user, root);
    case SectionKind::block:
      return f.write_block(is_root ? std::string_view(step.data) : std::string_view(), step.data.size(), user,
                           root, step.encode);
    case SectionKind::array: {
      const LocalArray local = local_array(step, counts, comm.rank(), (rng() & 1) != 0);
      return f.write_array(local.input, counts, step.element_size, user, step.encode);
    }
    case SectionKind::varray: {
      const LocalArray local = local_array(step, counts, comm.rank(), (rng() & 1) != 0);
      std::vector<std::uint64_t> rank_bytes;
      std::uint64_t i = 0;
      for (auto c : counts) {
        std::uint64_t s = 0;
        for (std::uint64_t k = 0; k < c; ++k) s += step.elements[static_cast<std::size_t>(i++)].size();
        rank_bytes.push_back(s);
      }
      return f.write_varray(local.input, counts, local.sizes, rank_bytes, user, step.encode);
    }
  }
  return Status{Errc::invalid_argument, "unknown step kind"};
}

}  // namespace

bool Outcome::ok() const { return all_ok(statuses); }
Status Outcome::first_error() const { return first_failure(statuses); }
bool ReadOutcome::ok() const { return all_ok(statuses); }
Status ReadOutcome::first_error() const { return first_failure(statuses); }

Outcome execute(const Script& script, int ranks, const std::vector<Partition>& partitions,
                const RunConfig& config) {
  auto memory = std::make_shared<MemoryMedium>();
  const auto medium = with_fault(memory, config.fault);
  std::vector<Status> statuses(static_cast<std::size_t>(ranks));
  std::vector<char> open_after(static_cast<std::size_t>(ranks), 0);

  World world(ranks, config.schedule, config.seed);
  world.run([&](Comm& comm) {
    const auto r = static_cast<std::size_t>(comm.rank());
    std::mt19937_64 rng(mix(config.seed, r));
    const auto diverge = [&](std::size_t call) {
      return config.fault.kind == FaultPlan::Kind::divergence && config.fault.call == call &&
             config.fault.rank == comm.rank();
    };
    std::string user = script.user;
    if (diverge(0)) perturb(user);
    Status st;
    File f = File::open(comm, medium, 'w', user, st, config.options);
    for (std::size_t k = 0; st.ok() && k < script.steps.size(); ++k) {
      const Step& step = script.steps[k];
      const Partition& counts = step.is_array() ? partitions.at(k) : Partition{};
      st = write_step(f, comm, step, counts, diverge(k + 1), rng);
    }
    if (st.ok()) st = f.close();
    statuses[r] = st;
    open_after[r] = f.is_open();
  });
  return Outcome{memory->contents(), std::move(statuses), {open_after.begin(), open_after.end()}};
}

std::string run_serial(const Script& script, const FileOptions& options) {
  std::vector<Partition> partitions;
  for (const auto& step : script.steps) partitions.push_back(Partition{step.count()});
  RunConfig config;
  config.options = options;
  return run_parallel(script, 1, partitions, config);
}

std::string run_parallel(const Script& script, int ranks, const std::vector<Partition>& partitions,
                         const RunConfig& config) {
  Outcome out = execute(script, ranks, partitions, config);
  if (!out.ok()) {
    const Status st = out.first_error();
    throw Error(st.code, st.detail);
  }
  return std::move(out.bytes);
}

ReadOutcome read_back(const std::string& bytes, int ranks, const ReadConfig& config) {
  std::string image = bytes;
  if (config.fault.kind == FaultPlan::Kind::truncation && config.fault.length < image.size()) {
    image.resize(static_cast<std::size_t>(config.fault.length));
  }
  const auto medium = with_fault(std::make_shared<MemoryMedium>(std::move(image)), config.fault);
  ReadOutcome out;
  out.statuses.resize(static_cast<std::size_t>(ranks));
  std::vector<char> open_after(static_cast<std::size_t>(ranks), 0);

  World world(ranks, config.schedule, config.seed);
  world.run([&](Comm& comm) {
    const auto r = static_cast<std::size_t>(comm.rank());
    const int P = comm.size();
    std::mt19937_64 layout_rng(mix(config.seed ^ 0x5ca1ab1eULL, r));
    std::vector<ReadSection> sections;
    std::string user;
    Status st;
    File f = File::open(comm, medium, 'r', user, st);
    for (std::size_t k = 0; st.ok(); ++k) {
      SectionInfo info;
      bool decode = config.decode;
      st = f.read_section_header(info, decode);
      if (!st.ok() || info.end_of_file) break;
      std::mt19937_64 part_rng(mix(config.seed, k));
      const int root = static_cast<int>(k % static_cast<std::size_t>(P));
      Section sec;
      sec.user = info.user;
      sec.kind = static_cast<SectionKind>(info.type);
      switch (info.type) {
        case 'I': {
          std::string buf(kInlineDataBytes, '\0');
          st = f.read_inline_data(config.skip ? std::nullopt : std::optional<std::span<char>>(buf), root);
          sec = Section::inline_data(info.user, comm.bcast(buf, root));
          break;
        }
        case 'B': {
          std::string buf(config.skip || comm.rank() != root ? 0 : static_cast<std::size_t>(info.size), '\0');
          st = f.read_block_data(config.skip ? std::nullopt : std::optional<std::span<char>>(buf), info.size,
                                 root);
          sec = Section::block(info.user, comm.bcast(buf, root));
          if (config.skip) sec.size = info.size;
          break;
        }
        case 'A': {
          const Partition counts = random_partition(static_cast<std::uint64_t>(info.count), P, part_rng);
          const std::uint64_t e = static_cast<std::uint64_t>(info.size);
          const std::uint64_t mine = counts[r];
          std::string flat(config.skip ? 0 : static_cast<std::size_t>(mine * e), '\0');
          std::vector<std::span<char>> list;
          ArrayOutput target;
          if (config.skip) {
            target = std::monostate{};
          } else if (layout_rng() & 1) {
            for (std::uint64_t i = 0; i < mine; ++i) list.emplace_back(flat.data() + i * e, e);
            target = std::span<const std::span<char>>(list);
          } else {
            target = std::span<char>(flat);
          }
          st = f.read_array_data(target, counts, e);
          std::string payload;
          for (auto& part : comm.allgather(flat)) payload += part;
          sec = Section::array(info.user, info.count, info.size, std::move(payload));
          break;
        }
        case 'V': {
          const Partition counts = random_partition(static_cast<std::uint64_t>(info.count), P, part_rng);
          const std::uint64_t mine = counts[r];
          std::vector<std::uint64_t> sizes(mine);
          st = f.read_varray_sizes(std::optional<std::span<std::uint64_t>>(sizes), counts);
          if (!st.ok()) break;
          const std::uint64_t local = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
          const auto rank_bytes = comm.allgather_value(local);
          std::string flat(config.skip ? 0 : static_cast<std::size_t>(local), '\0');
          std::vector<std::span<char>> list;
          ArrayOutput target;
          if (config.skip) {
            target = std::monostate{};
          } else if (layout_rng() & 1) {
            std::size_t pos = 0;
            for (auto s : sizes) {
              list.emplace_back(flat.data() + pos, s);
              pos += s;
            }
            target = std::span<const std::span<char>>(list);
          } else {
            target = std::span<char>(flat);
          }
          st = f.read_varray_data(target, counts, sizes, rank_bytes);
          std::vector<Count> all_sizes;
          std::string payload;
          for (auto& part : comm.allgather(Packer().u64s(sizes).str(flat).take())) {
            Unpacker in(part);
            for (auto s : in.u64s()) all_sizes.push_back(s);
            payload += in.str();
          }
          sec = Section::varray(info.user, std::move(all_sizes), std::move(payload));
          break;
        }
        default:
          st = Status{Errc::invalid_argument, "unexpected section type"};
      }
      if (st.ok()) sections.push_back(ReadSection{std::move(sec), decode});
    }
    if (st.ok()) st = f.close();
    out.statuses[r] = st;
    open_after[r] = f.is_open();
    if (r == 0) {
      out.user = user;
      out.sections = std::move(sections);
    }
  });
  out.open_after.assign(open_after.begin(), open_after.end());
  return out;
}

std::vector<ReadSection> expected_sections(const Script& script, bool decode, const FileOptions& options) {
  std::vector<ReadSection> out;
  for (const Step& step : script.steps) {
    std::string payload;
    std::vector<Count> sizes;
    for (const auto& e : step.elements) {
      payload += e;
      sizes.push_back(e.size());
    }
    Section logical;
    switch (step.kind) {
      case SectionKind::inline_data: logical = Section::inline_data(step.user, step.data); break;
      case SectionKind::block: logical = Section::block(step.user, step.data); break;
      case SectionKind::array:
        logical = Section::array(step.user, step.count(), step.element_size, payload);
        break;
      case SectionKind::varray: logical = Section::varray(step.user, sizes, payload); break;
    }
    if (!step.encode) {
      out.push_back(ReadSection{std::move(logical), false});
      continue;
    }
    if (decode) {
      out.push_back(ReadSection{std::move(logical), true});
      continue;
    }
    CompressedPair pair;
    switch (step.kind) {
      case SectionKind::block:
        pair = wrap_compressed_block(step.user, step.data, options.style, options.level);
        break;
      case SectionKind::array:
        pair = wrap_compressed_array_fixed(step.user, step.count(), step.element_size, payload, options.style,
                                           options.level);
        break;
      case SectionKind::varray:
        pair = wrap_compressed_array_var(step.user, sizes, payload, options.style, options.level);
        break;
      default: break;
    }
    out.push_back(ReadSection{std::move(pair.meta), false});
    out.push_back(ReadSection{std::move(pair.data), false});
  }
  return out;
}

namespace {

std::string describe(const Section& s) {
  std::ostringstream os;
  os << letter(s.kind) << " user(" << s.user.size() << ") N=" << to_decimal(s.count)
     << " E=" << to_decimal(s.size) << " sizes=" << s.sizes.size() << " payload=" << s.payload.size();
  return os.str();
}

}  // namespace

std::string run_read_check(const std::string& bytes, const Script& script, int ranks, const ReadConfig& config,
                           const FileOptions& options) {
  const ReadOutcome got = read_back(bytes, ranks, config);
  if (!got.ok()) {
    const Status st = got.first_error();
    return "read failed: " + std::string(message(st.code)) + ": " + st.detail;
  }
  if (got.user != script.user) return "file user string differs";
  const auto want = expected_sections(script, config.decode, options);
  if (got.sections.size() != want.size()) {
    return "read " + std::to_string(got.sections.size()) + " sections, expected " + std::to_string(want.size());
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    Section expect = want[i].section;
    if (config.skip) {
      expect.payload = got.sections[i].section.payload;
      if (expect.kind == SectionKind::varray) expect.sizes = got.sections[i].section.sizes;
    }
    if (got.sections[i].decoded != want[i].decoded) {
      return "section " + std::to_string(i) + ": decode flag differs";
    }
    if (!(got.sections[i].section == expect)) {
      return "section " + std::to_string(i) + ": got " + describe(got.sections[i].section) + ", expected " +
             describe(expect);
    }
  }
  return {};
}

Partition random_partition(std::uint64_t n, int ranks, std::mt19937_64& rng) {
  std::vector<std::uint64_t> cuts;
  const int mode = static_cast<int>(rng() % 4);
  for (int i = 0; i + 1 < ranks; ++i) {
    switch (mode) {
      case 0: cuts.push_back(0); break;   // everything on the last rank
      case 1: cuts.push_back(n); break;   // everything on rank 0
      default: cuts.push_back(n == 0 ? 0 : rng() % (n + 1)); break;
    }
  }
  std::sort(cuts.begin(), cuts.end());
  Partition out;
  std::uint64_t prev = 0;
  for (auto c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(n - prev);
  return out;
}

std::vector<Partition> random_partitions(const Script& script, int ranks, std::mt19937_64& rng) {
  std::vector<Partition> out;
  for (const auto& step : script.steps) {
    out.push_back(step.is_array() ? random_partition(step.count(), ranks, rng) : Partition{});
  }
  return out;
}

namespace {

std::string random_bytes(std::mt19937_64& rng, std::size_t n, bool ascii) {
  std::string out(n, '\0');
  switch (rng() % 3) {
    case 0:  // incompressible
      for (auto& c : out) c = ascii ? static_cast<char>(32 + rng() % 95) : static_cast<char>(rng());
      break;
    case 1: {  // short repeating motif
      const std::string motif = random_bytes(rng, 1 + rng() % 5, ascii);
      for (std::size_t i = 0; i < n; ++i) out[i] = motif[i % motif.size()];
      break;
    }
    default:  // text with line breaks
      for (auto& c : out) {
        const auto v = rng() % 40;
        c = v == 0 && !ascii ? '\n' : static_cast<char>('a' + v % 26);
      }
  }
  return out;
}

std::string random_user(std::mt19937_64& rng, bool ascii) {
  const std::size_t n = rng() % 4 == 0 ? kMaxUserBytes : rng() % (kMaxUserBytes + 1);
  return random_bytes(rng, n, ascii || rng() % 3 != 0);
}

}  // namespace

Script random_script(std::mt19937_64& rng, const ScriptShape& shape) {
  Script script;
  script.user = random_user(rng, shape.ascii);
  const std::size_t steps = rng() % (shape.max_steps + 1);
  for (std::size_t k = 0; k < steps; ++k) {
    Step step;
    static constexpr SectionKind kinds[] = {SectionKind::inline_data, SectionKind::block, SectionKind::array,
                                            SectionKind::varray};
    step.kind = kinds[rng() % 4];
    step.user = random_user(rng, shape.ascii);
    step.root = static_cast<int>(rng() % 8);
    step.encode = shape.allow_encode && step.kind != SectionKind::inline_data && rng() % 5 < 2;
    switch (step.kind) {
      case SectionKind::inline_data: step.data = random_bytes(rng, kInlineDataBytes, shape.ascii); break;
      case SectionKind::block:
        step.data = random_bytes(rng, rng() % 4 == 0 ? 0 : rng() % (shape.max_bytes + 1), shape.ascii);
        break;
      case SectionKind::array: {
        const std::size_t n = rng() % (shape.max_elements + 1);
        step.element_size = rng() % 6 == 0 ? 0 : rng() % 17;
        for (std::size_t i = 0; i < n; ++i) {
          step.elements.push_back(random_bytes(rng, static_cast<std::size_t>(step.element_size), shape.ascii));
        }
        break;
      }
      case SectionKind::varray: {
        const std::size_t n = rng() % (shape.max_elements + 1);
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t len = rng() % 4 == 0 ? 0 : rng() % (shape.max_bytes / 4 + 1);
          step.elements.push_back(random_bytes(rng, len, shape.ascii));
        }
        break;
      }
    }
    script.steps.push_back(std::move(step));
  }
  return script;
}

namespace {

FileOptions random_options(std::mt19937_64& rng) {
  FileOptions o;
  o.style = rng() & 1 ? LineStyle::Mime : LineStyle::Unix;
  static constexpr int levels[] = {kStoredLevel, 1, kBestLevel};
  o.level = levels[rng() % 3];
  return o;
}

void record(SuiteReport& report, bool ok, std::uint64_t seed, const std::string& what) {
  if (ok) {
    ++report.passed;
    return;
  }
  ++report.failed;
  report.failures.push_back("seed " + std::to_string(seed) + ": " + what);
}

}  // namespace

SuiteReport fuzz_partition_independence(std::size_t cases, int max_ranks, std::uint64_t seed,
                                        std::size_t schedules) {
  SuiteReport report;
  for (std::size_t i = 0; i < cases; ++i) {
    const std::uint64_t case_seed = seed + i;
    std::mt19937_64 rng(case_seed);
    const Script script = random_script(rng);
    const FileOptions options = random_options(rng);
    std::string what;
    try {
      const std::string serial = run_serial(script, options);
      for (int P = 1; P <= max_ranks && what.empty(); ++P) {
        for (std::size_t s = 0; s < schedules && what.empty(); ++s) {
          RunConfig config;
          config.options = options;
          config.seed = rng();
          config.schedule = s % 2 == 0 ? Schedule::round_robin : Schedule::threads;
          const auto partitions = random_partitions(script, P, rng);
          if (run_parallel(script, P, partitions, config) != serial) {
            what = "P=" + std::to_string(P) + " differs from the serial file";
          }
        }
      }
    } catch (const std::exception& e) {
      what = e.what();
    }
    record(report, what.empty(), case_seed, what);
  }
  return report;
}

SuiteReport fuzz_read_back(std::size_t cases, int max_ranks, std::uint64_t seed) {
  SuiteReport report;
  for (std::size_t i = 0; i < cases; ++i) {
    const std::uint64_t case_seed = seed + i;
    std::mt19937_64 rng(case_seed);
    const Script script = random_script(rng);
    const FileOptions options = random_options(rng);
    std::string what;
    try {
      const int writers = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_ranks));
      RunConfig config;
      config.options = options;
      config.seed = rng();
      const std::string bytes = run_parallel(script, writers, random_partitions(script, writers, rng), config);
      ReadConfig read;
      read.decode = (rng() & 1) != 0;
      read.seed = rng();
      read.skip = rng() % 8 == 0;
      read.schedule = rng() & 1 ? Schedule::threads : Schedule::round_robin;
      const int readers = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_ranks));
      what = run_read_check(bytes, script, readers, read, options);
    } catch (const std::exception& e) {
      what = e.what();
    }
    record(report, what.empty(), case_seed, what);
  }
  return report;
}

SuiteReport fuzz_faults(std::size_t cases, int max_ranks, std::uint64_t seed) {
  SuiteReport report;
  for (std::size_t i = 0; i < cases; ++i) {
    const std::uint64_t case_seed = seed + i;
    std::mt19937_64 rng(case_seed);
    const Script script = random_script(rng);
    const FileOptions options = random_options(rng);
    const int P = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_ranks));
    std::string what;
    try {
      const std::string serial = run_serial(script, options);
      const auto all_failed = [](const std::vector<Status>& st, const std::vector<bool>& open) {
        return std::none_of(st.begin(), st.end(), [](const Status& s) { return s.ok(); }) &&
               std::none_of(open.begin(), open.end(), [](bool b) { return b; });
      };
      switch (rng() % 3) {
        case 0: {
          RunConfig config;
          config.options = options;
          config.seed = rng();
          config.fault.kind = FaultPlan::Kind::divergence;
          config.fault.call = rng() % (script.steps.size() + 1);
          config.fault.rank = static_cast<int>(rng() % static_cast<std::uint64_t>(P));
          const Outcome out = execute(script, P, random_partitions(script, P, rng), config);
          if (P > 1 && !all_failed(out.statuses, out.open_after)) what = "divergence not detected on every rank";
          if (P == 1 && !out.ok() && !all_failed(out.statuses, out.open_after)) what = "context survived an error";
          break;
        }
        case 1: {
          RunConfig config;
          config.options = options;
          config.seed = rng();
          config.fault.kind = FaultPlan::Kind::io_failure;
          config.fault.op = static_cast<StorageOp>(rng() % 5);
          config.fault.trigger = rng() % 12;
          const Outcome out = execute(script, P, random_partitions(script, P, rng), config);
          if (out.ok()) {
            if (out.bytes != serial) what = "unfaulted run differs from the serial file";
          } else if (!all_failed(out.statuses, out.open_after)) {
            what = "io failure did not fail every rank";
          }
          break;
        }
        default: {
          ReadConfig read;
          read.seed = rng();
          read.decode = (rng() & 1) != 0;
          read.fault.kind = FaultPlan::Kind::truncation;
          read.fault.length = serial.empty() ? 0 : rng() % serial.size();
          const ReadOutcome out = read_back(serial, P, read);
          if (out.ok()) {
            const auto want = expected_sections(script, read.decode, options);
            if (out.sections.size() > want.size()) what = "truncated file yielded extra sections";
          } else if (!all_failed(out.statuses, out.open_after)) {
            what = "truncation did not fail every rank";
          }
        }
      }
    } catch (const std::exception& e) {
      what = e.what();
    }
    record(report, what.empty(), case_seed, what);
  }
  return report;
}

}  // namespace scda::parsim

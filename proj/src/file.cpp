#include "scda/file.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "pack.hpp"
#include "scda/compress.hpp"
#include "scda/kernels.hpp"
#include "scda/partition.hpp"
#include "scda/sections.hpp"

namespace scda {
namespace {

using detail::Packer;
using detail::Unpacker;

[[noreturn]] void usage(Errc code, const std::string& what) { throw Error(code, what); }

void pack_record(Packer& p, const SectionRecord& r) {
  p.u64(static_cast<std::uint64_t>(letter(r.kind)))
      .str(r.user)
      .count(r.count)
      .count(r.size)
      .u64(r.offset)
      .u64(r.sizes_offset)
      .u64(r.payload_offset)
      .u64(r.payload_length)
      .u64(r.end);
}

SectionRecord unpack_record(Unpacker& u) {
  SectionRecord r;
  r.kind = static_cast<SectionKind>(static_cast<char>(u.u64()));
  r.user = u.str();
  r.count = u.count();
  r.size = u.count();
  r.offset = u.u64();
  r.sizes_offset = u.u64();
  r.payload_offset = u.u64();
  r.payload_length = u.u64();
  r.end = u.u64();
  return r;
}

std::uint64_t to_u64(Count c, Errc code, const char* what) {
  if (!fits_u64(c)) throw Error(code, what);
  return static_cast<std::uint64_t>(c);
}

std::uint64_t sum_u64(std::span<const std::uint64_t> v, Errc code) {
  Count total = 0;
  for (auto x : v) total += x;
  return to_u64(total, code, "sum does not fit into 64 bits");
}

// Rank p's exclusive prefix of `bytes`.
std::uint64_t prefix(std::span<const std::uint64_t> bytes, int p) {
  return std::accumulate(bytes.begin(), bytes.begin() + p, std::uint64_t{0});
}

std::uint64_t check_partition(std::span<const std::uint64_t> counts, int size, Count n) {
  if (counts.size() != static_cast<std::size_t>(size)) {
    usage(Errc::partition_mismatch, "partition must list one count per rank");
  }
  Count total = 0;
  for (auto c : counts) total += c;
  if (total != n) {
    usage(Errc::partition_mismatch, "partition counts sum to " + to_decimal(total) +
                                        " instead of " + to_decimal(n));
  }
  return static_cast<std::uint64_t>(total);
}

// Views of this rank's elements; validates their sizes.
std::vector<std::string_view> local_elements(const ArrayInput& data,
                                             std::span<const std::uint64_t> sizes) {
  if (const auto* flat = std::get_if<std::string_view>(&data)) {
    try {
      return split_sizes(*flat, sizes);
    } catch (const LengthError&) {
      usage(Errc::length_mismatch, "local data does not match the element sizes");
    }
  }
  const auto& list = std::get<std::span<const std::string_view>>(data);
  if (list.size() != sizes.size()) usage(Errc::length_mismatch, "wrong number of local elements");
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].size() != sizes[i]) usage(Errc::length_mismatch, "local element has the wrong size");
  }
  return {list.begin(), list.end()};
}

void check_output(const ArrayOutput& out, std::span<const std::uint64_t> sizes) {
  if (const auto* flat = std::get_if<std::span<char>>(&out)) {
    if (flat->size() != sum_u64(sizes, Errc::length_mismatch)) {
      usage(Errc::length_mismatch, "output buffer has the wrong size");
    }
  } else if (const auto* list = std::get_if<std::span<const std::span<char>>>(&out)) {
    if (list->size() != sizes.size()) usage(Errc::length_mismatch, "wrong number of output elements");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if ((*list)[i].size() != sizes[i]) usage(Errc::length_mismatch, "output element has the wrong size");
    }
  }
}

void scatter(const ArrayOutput& out, std::span<const std::string> elements) {
  if (const auto* flat = std::get_if<std::span<char>>(&out)) {
    std::size_t pos = 0;
    for (const auto& e : elements) {
      std::copy(e.begin(), e.end(), flat->begin() + static_cast<std::ptrdiff_t>(pos));
      pos += e.size();
    }
  } else if (const auto* list = std::get_if<std::span<const std::span<char>>>(&out)) {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      std::copy(elements[i].begin(), elements[i].end(), (*list)[i].begin());
    }
  }
}

std::string entries(char letter, std::span<const std::uint64_t> sizes, LineStyle style) {
  std::string out;
  out.reserve(sizes.size() * kCountEntryBytes);
  for (auto s : sizes) out.append(encode_count(letter, s, style));
  return out;
}

std::vector<std::uint64_t> decode_entries(std::string_view bytes, char letter) {
  std::vector<std::uint64_t> out;
  out.reserve(bytes.size() / kCountEntryBytes);
  for (std::size_t i = 0; i < bytes.size(); i += kCountEntryBytes) {
    const Count c = decode_count(bytes.substr(i, kCountEntryBytes), letter);
    out.push_back(to_u64(c, Errc::count_overflow, "element size does not fit into 64 bits"));
  }
  return out;
}

// Layout of an A or V section whose payload is distributed over ranks.
struct ArrayLayout {
  char type = 'A';
  std::string user;
  std::vector<std::uint64_t> counts;
  std::uint64_t element_size = 0;           // A only
  std::vector<std::uint64_t> rank_bytes;    // S_q as stored in the file

  Count total_bytes() const {
    Count s = 0;
    for (auto b : rank_bytes) s += b;
    return s;
  }
  Count total_count() const {
    Count n = 0;
    for (auto c : counts) n += c;
    return n;
  }
  std::uint64_t payload_offset(std::uint64_t at) const {
    if (type == 'A') return at + kSectionHeaderBytes + 2 * kCountEntryBytes;
    return at + kSectionHeaderBytes + kCountEntryBytes +
           static_cast<std::uint64_t>(total_count()) * kCountEntryBytes;
  }
  std::uint64_t end(std::uint64_t at) const {
    const Count s = total_bytes();
    const Count e = Count{payload_offset(at)} + s + data_pad_length(s);
    return to_u64(e, Errc::count_range, "section does not fit 64-bit offsets");
  }
  int padding_owner() const {
    for (int p = static_cast<int>(rank_bytes.size()) - 1; p >= 0; --p) {
      if (rank_bytes[static_cast<std::size_t>(p)] > 0) return p;
    }
    return 0;
  }
};

std::vector<std::uint64_t> fixed_rank_bytes(std::span<const std::uint64_t> counts, std::uint64_t e) {
  std::vector<std::uint64_t> out;
  for (Count s : byte_sizes_fixed(counts, e)) {
    out.push_back(to_u64(s, Errc::count_range, "rank byte count does not fit into 64 bits"));
  }
  return out;
}

struct Pending {
  char type = 0;
  bool decoded = false;
  SectionRecord first;
  SectionRecord second;
  Count u = 0;

  bool sizes_done = false;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> logical_bytes;
  std::vector<std::uint64_t> file_bytes;
  std::vector<std::uint64_t> my_sizes;
  std::vector<std::uint64_t> my_file_sizes;

  // Section whose payload holds the element bytes.
  const SectionRecord& data() const { return decoded ? second : first; }
};

}  // namespace

class File::Impl {
 public:
  Impl(Comm& comm, const FileOptions& options)
      : comm(&comm), rank(comm.rank()), size(comm.size()), options(options) {}

  // Runs the local phase of a collective call, then agrees on its outcome.
  // Returns every rank's payload, or throws the same error class on all
  // ranks if any rank failed or the collective parameters differ.
  std::vector<std::string> sync(const std::string& params, const std::function<std::string()>& local) {
    Errc code = Errc::ok;
    std::string detail;
    std::string payload;
    try {
      payload = local();
    } catch (const Error& e) {
      code = e.code();
      detail = e.what();
    } catch (const std::exception& e) {
      code = Errc::invalid_argument;
      detail = e.what();
    }
    Packer msg;
    msg.u64(static_cast<std::uint64_t>(code)).str(detail).str(params).str(payload);
    const auto all = comm->allgather(msg.take());

    std::vector<std::string> payloads;
    Errc first_code = Errc::ok;
    std::string first_detail;
    std::string params0;
    for (int q = 0; q < size; ++q) {
      Unpacker in(all[static_cast<std::size_t>(q)]);
      const auto c = static_cast<Errc>(in.u64());
      std::string d = in.str();
      std::string prm = in.str();
      payloads.push_back(in.str());
      if (q == 0) {
        params0 = std::move(prm);
      } else if (prm != params0) {
        throw Error(Errc::collective_mismatch,
                    "collective parameters of rank " + std::to_string(q) + " differ from rank 0");
      }
      if (c != Errc::ok && first_code == Errc::ok) {
        first_code = c;
        first_detail = "rank " + std::to_string(q) + ": " + d;
      }
    }
    if (code != Errc::ok) throw Error(code, detail);
    if (first_code != Errc::ok) throw Error(first_code, first_detail);
    return payloads;
  }

  void write(std::uint64_t at, std::string_view bytes) {
    if (!bytes.empty()) storage->write_at(at, bytes);
  }

  std::string read(std::uint64_t at, std::uint64_t length) {
    std::string out(static_cast<std::size_t>(length), '\0');
    if (length > 0) storage->read_at(at, out);
    return out;
  }

  // Local part of writing a distributed A or V section at `at`: rank 0
  // writes the header and count entries, each rank its size entries and
  // data window, and the owner of the last payload byte the padding.
  void write_array_section(std::uint64_t at, const ArrayLayout& layout, std::string_view local_entries,
                           std::string_view local_data) {
    const Count n = layout.total_count();
    const std::uint64_t payload = layout.payload_offset(at);
    if (rank == 0) {
      std::string head = encode_section_header(layout.type, layout.user, options.style);
      head.append(encode_count(kElementCountLetter, n, options.style));
      if (layout.type == 'A') head.append(encode_count(kByteSizeLetter, layout.element_size, options.style));
      write(at, head);
    }
    const auto r = static_cast<std::size_t>(rank);
    if (layout.type == 'V') {
      const std::uint64_t before = prefix(layout.counts, rank);
      write(at + kSectionHeaderBytes + kCountEntryBytes + before * kCountEntryBytes, local_entries);
    }
    write(payload + prefix(layout.rank_bytes, rank), local_data);
    if (rank == layout.padding_owner()) {
      const Count s = layout.total_bytes();
      const std::optional<char> last =
          layout.rank_bytes[r] > 0 ? std::optional<char>(local_data.back()) : std::nullopt;
      write(payload + static_cast<std::uint64_t>(s), pad_data(s, last, options.style));
    }
  }

  // Reads this rank's window of 32-byte size entries of a V section, or
  // of the entry payload of a meta A section.
  std::vector<std::uint64_t> read_size_window(const SectionRecord& rec, std::span<const std::uint64_t> counts,
                                              char letter) {
    const std::uint64_t first = prefix(counts, rank);
    const std::uint64_t n = counts[static_cast<std::size_t>(rank)];
    const std::uint64_t at = rec.kind == SectionKind::varray ? rec.sizes_offset : rec.payload_offset;
    return decode_entries(read(at + first * kCountEntryBytes, n * kCountEntryBytes), letter);
  }

  void abandon() {
    if (storage) {
      try {
        storage->close();
      } catch (...) {
      }
    }
    storage.reset();
  }

  // Parses the next section on rank 0 and packs what all ranks need.
  std::string parse_header(bool decode) {
    StorageSource src(*storage);
    Packer out;
    if (cursor == src.size()) {
      out.u64(1);
      return out.take();
    }
    Pending p;
    p.first = parse_section_head(src, cursor);
    const auto wrapped = decode ? detect_compression(p.first.kind, p.first.user) : std::nullopt;
    if (wrapped) {
      const std::uint64_t meta_end = p.first.end;
      if (meta_end >= src.size()) {
        throw FormatError("compression magic without a data section", Errc::nonconforming_wrapper);
      }
      p.second = parse_section_head(src, meta_end);
      check_pair_layout(*wrapped, p.first, p.second);
      if (*wrapped != SectionKind::varray) {
        try {
          p.u = decode_count(src.read(p.first.payload_offset, kCountEntryBytes), kUncompressedLetter);
        } catch (const FormatError& e) {
          throw FormatError(std::string("compression wrapper: ") + e.what(), Errc::nonconforming_wrapper);
        }
      }
      p.decoded = true;
      p.type = letter(*wrapped);
    } else {
      p.type = letter(p.first.kind);
    }
    out.u64(0).u64(static_cast<std::uint64_t>(p.type)).u64(p.decoded).count(p.u);
    pack_record(out, p.first);
    pack_record(out, p.second);
    return out.take();
  }

  Comm* comm;
  int rank;
  int size;
  FileOptions options;
  AccessMode mode = AccessMode::read;
  std::unique_ptr<Storage> storage;
  std::uint64_t cursor = 0;
  std::optional<Pending> pending;
};

File::File() = default;
File::~File() {
  if (impl_) impl_->abandon();
}
File::File(File&&) noexcept = default;
File& File::operator=(File&&) noexcept = default;
File::File(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

std::uint64_t File::cursor() const { return impl_ ? impl_->cursor : 0; }

template <typename Body>
Status File::guarded(Body&& body) {
  if (!impl_) return Status{Errc::context_closed, std::string(message(Errc::context_closed))};
  try {
    body(*impl_);
    return Status{};
  } catch (const Error& e) {
    impl_->abandon();
    impl_.reset();
    return Status{e.code(), e.what()};
  }
}

File File::open(Comm& comm, std::shared_ptr<Medium> medium, char mode, std::string& user,
                Status& status, const FileOptions& options) {
  auto impl = std::make_unique<Impl>(comm, options);
  Impl& f = *impl;
  try {
    const std::string params = Packer().u64(static_cast<unsigned char>(mode)).str(mode == 'w' ? user : "").take();
    if (mode == 'w') {
      f.mode = AccessMode::write;
      f.sync(params, [&] {
        if (user.size() > kMaxUserBytes) usage(Errc::length_mismatch, "user string exceeds 58 bytes");
        if (f.rank == 0) {
          f.storage = medium->open(AccessMode::write, true);
          f.write(0, encode_file_header(FileHeader{kFormatVersion, std::string(kVendor), user},
                                        options.style));
        }
        return std::string();
      });
      f.sync({}, [&] {
        if (f.rank != 0) f.storage = medium->open(AccessMode::write, false);
        return std::string();
      });
    } else if (mode == 'r') {
      f.mode = AccessMode::read;
      const auto res = f.sync(params, [&] {
        f.storage = medium->open(AccessMode::read, false);
        if (f.rank != 0) return std::string();
        if (f.storage->size() < kFileHeaderBytes) {
          throw FormatError("file is shorter than its header", Errc::bad_magic);
        }
        return decode_file_header(f.read(0, kFileHeaderBytes)).user;
      });
      user = res[0];
    } else {
      f.sync(params, [&]() -> std::string { usage(Errc::bad_mode, "mode must be 'w' or 'r'"); });
    }
    f.cursor = kFileHeaderBytes;
    status = Status{};
    return File(std::move(impl));
  } catch (const Error& e) {
    f.abandon();
    status = Status{e.code(), e.what()};
    return File();
  }
}

File File::open(Comm& comm, const std::filesystem::path& path, char mode, std::string& user,
                Status& status, const FileOptions& options) {
  return open(comm, std::make_shared<DiskMedium>(path), mode, user, status, options);
}

Status File::close() {
  if (!impl_) return Status{Errc::context_closed, std::string(message(Errc::context_closed))};
  Status st;
  try {
    impl_->sync("close", [&] {
      impl_->storage->flush();
      auto storage = std::move(impl_->storage);
      storage->close();
      return std::string();
    });
  } catch (const Error& e) {
    st = Status{e.code(), e.what()};
  }
  impl_->abandon();
  impl_.reset();
  return st;
}

Status File::write_inline(std::string_view data, std::string_view user, int root) {
  return guarded([&](Impl& f) {
    const std::string params = Packer().str("I").str(user).u64(static_cast<std::uint64_t>(root)).take();
    f.sync(params, [&] {
      if (f.mode != AccessMode::write) usage(Errc::call_sequence, "file is not open for writing");
      if (root < 0 || root >= f.size) usage(Errc::root_out_of_range, "root rank out of range");
      if (user.size() > kMaxUserBytes) usage(Errc::length_mismatch, "user string exceeds 58 bytes");
      if (f.rank == root) {
        if (data.size() != kInlineDataBytes) usage(Errc::length_mismatch, "inline data must be 32 bytes");
        f.write(f.cursor, encode_inline(user, data, f.options.style));
      }
      return std::string();
    });
    f.cursor += kInlineSectionBytes;
  });
}

Status File::write_block(std::string_view data, Count size, std::string_view user, int root, bool encode) {
  return guarded([&](Impl& f) {
    const std::string params =
        Packer().str("B").count(size).str(user).u64(static_cast<std::uint64_t>(root)).u64(encode).take();
    const auto res = f.sync(params, [&] {
      if (f.mode != AccessMode::write) usage(Errc::call_sequence, "file is not open for writing");
      if (root < 0 || root >= f.size) usage(Errc::root_out_of_range, "root rank out of range");
      if (user.size() > kMaxUserBytes) usage(Errc::length_mismatch, "user string exceeds 58 bytes");
      if (size > kMaxCount) throw RangeError("block size exceeds 26 decimal digits");
      if (f.rank != root) return std::string();
      if (data.size() != size) usage(Errc::length_mismatch, "block data does not have E bytes");
      std::string bytes;
      if (encode) {
        const CompressedPair pair = wrap_compressed_block(user, data, f.options.style, f.options.level);
        bytes = encode_section(pair.meta, f.options.style) + encode_section(pair.data, f.options.style);
      } else {
        bytes = encode_block(user, data, f.options.style);
      }
      f.write(f.cursor, bytes);
      return Packer().u64(bytes.size()).take();
    });
    f.cursor += Unpacker(res[static_cast<std::size_t>(root)]).u64();
  });
}

Status File::write_array(const ArrayInput& data, std::span<const std::uint64_t> counts,
                         std::uint64_t element_size, std::string_view user, bool encode) {
  return guarded([&](Impl& f) {
    const std::string params =
        Packer().str("A").u64s(counts).u64(element_size).str(user).u64(encode).take();
    ArrayLayout layout;
    std::string local_entries;
    std::string local_data;
    std::vector<std::string_view> elements;
    const auto gathered = f.sync(params, [&] {
      if (f.mode != AccessMode::write) usage(Errc::call_sequence, "file is not open for writing");
      if (counts.size() != static_cast<std::size_t>(f.size)) {
        usage(Errc::partition_mismatch, "partition must list one count per rank");
      }
      if (user.size() > kMaxUserBytes) usage(Errc::length_mismatch, "user string exceeds 58 bytes");
      const Count n = std::accumulate(counts.begin(), counts.end(), Count{0});
      if (n > kMaxCount || element_size > kMaxCount || !checked_mul(n, element_size)) {
        throw RangeError("array size exceeds 26 decimal digits");
      }
      const std::uint64_t mine = counts[static_cast<std::size_t>(f.rank)];
      const std::vector<std::uint64_t> sizes(mine, element_size);
      elements = local_elements(data, sizes);
      if (!encode) return std::string();
      std::vector<std::uint64_t> compressed;
      for (auto& c : compress_elements(elements, f.options.style, f.options.level)) {
        compressed.push_back(c.armored.size());
        local_data.append(c.armored);
      }
      local_entries = entries(kByteSizeLetter, compressed, f.options.style);
      return Packer().u64(local_data.size()).take();
    });

    layout.user = std::string(user);
    layout.counts.assign(counts.begin(), counts.end());
    if (!encode) {
      layout.type = 'A';
      layout.element_size = element_size;
      layout.rank_bytes = fixed_rank_bytes(counts, element_size);
      f.sync({}, [&] {
        for (auto e : elements) local_data.append(e);
        f.write_array_section(f.cursor, layout, {}, local_data);
        return std::string();
      });
      f.cursor = layout.end(f.cursor);
      return;
    }
    layout.type = 'V';
    for (const auto& g : gathered) layout.rank_bytes.push_back(Unpacker(g).u64());
    const std::uint64_t data_at = f.cursor + kInlineSectionBytes;
    f.sync({}, [&] {
      if (f.rank == 0) {
        f.write(f.cursor, encode_inline(compression_magic(SectionKind::array),
                                        encode_count(kUncompressedLetter, element_size, f.options.style),
                                        f.options.style));
      }
      f.write_array_section(data_at, layout, local_entries, local_data);
      return std::string();
    });
    f.cursor = layout.end(data_at);
  });
}

Status File::write_varray(const ArrayInput& data, std::span<const std::uint64_t> counts,
                          std::span<const std::uint64_t> local_sizes,
                          std::span<const std::uint64_t> rank_bytes, std::string_view user,
                          bool encode) {
  return guarded([&](Impl& f) {
    const std::string params =
        Packer().str("V").u64s(counts).u64s(rank_bytes).str(user).u64(encode).take();
    std::string local_entries;
    std::string local_u_entries;
    std::string local_data;
    const auto gathered = f.sync(params, [&] {
      if (f.mode != AccessMode::write) usage(Errc::call_sequence, "file is not open for writing");
      if (counts.size() != static_cast<std::size_t>(f.size) ||
          rank_bytes.size() != static_cast<std::size_t>(f.size)) {
        usage(Errc::partition_mismatch, "partition must list one count and byte total per rank");
      }
      if (user.size() > kMaxUserBytes) usage(Errc::length_mismatch, "user string exceeds 58 bytes");
      const Count n = std::accumulate(counts.begin(), counts.end(), Count{0});
      const Count total = std::accumulate(rank_bytes.begin(), rank_bytes.end(), Count{0});
      if (n > kMaxCount || total > kMaxCount) throw RangeError("array size exceeds 26 decimal digits");
      const auto r = static_cast<std::size_t>(f.rank);
      if (local_sizes.size() != counts[r]) usage(Errc::length_mismatch, "wrong number of local element sizes");
      const Count local_sum = std::accumulate(local_sizes.begin(), local_sizes.end(), Count{0});
      if (local_sum != rank_bytes[r]) {
        usage(Errc::length_mismatch, "local element sizes do not sum to this rank's byte count");
      }
      const auto elements = local_elements(data, local_sizes);
      if (!encode) {
        local_entries = entries(kByteSizeLetter, local_sizes, f.options.style);
        for (auto e : elements) local_data.append(e);
        return std::string();
      }
      local_u_entries = entries(kUncompressedLetter, local_sizes, f.options.style);
      std::vector<std::uint64_t> compressed;
      for (auto& c : compress_elements(elements, f.options.style, f.options.level)) {
        compressed.push_back(c.armored.size());
        local_data.append(c.armored);
      }
      local_entries = entries(kByteSizeLetter, compressed, f.options.style);
      return Packer().u64(local_data.size()).take();
    });

    ArrayLayout layout;
    layout.type = 'V';
    layout.user = std::string(user);
    layout.counts.assign(counts.begin(), counts.end());
    if (!encode) {
      layout.rank_bytes.assign(rank_bytes.begin(), rank_bytes.end());
      f.sync({}, [&] {
        f.write_array_section(f.cursor, layout, local_entries, local_data);
        return std::string();
      });
      f.cursor = layout.end(f.cursor);
      return;
    }
    ArrayLayout meta;
    meta.type = 'A';
    meta.user = compression_magic(SectionKind::varray);
    meta.counts = layout.counts;
    meta.element_size = kCountEntryBytes;
    meta.rank_bytes = fixed_rank_bytes(counts, kCountEntryBytes);
    for (const auto& g : gathered) layout.rank_bytes.push_back(Unpacker(g).u64());
    const std::uint64_t data_at = meta.end(f.cursor);
    f.sync({}, [&] {
      f.write_array_section(f.cursor, meta, {}, local_u_entries);
      f.write_array_section(data_at, layout, local_entries, local_data);
      return std::string();
    });
    f.cursor = layout.end(data_at);
  });
}

Status File::read_section_header(SectionInfo& info, bool& decode) {
  return guarded([&](Impl& f) {
    const bool decode_in = decode;
    const auto res = f.sync(Packer().str("H").u64(decode_in).take(), [&] {
      if (f.mode != AccessMode::read) usage(Errc::call_sequence, "file is not open for reading");
      if (f.pending) usage(Errc::call_sequence, "previous section has not been read");
      return f.rank == 0 ? f.parse_header(decode_in) : std::string();
    });
    Unpacker in(res[0]);
    info = SectionInfo{};
    if (in.u64() == 1) {
      info.end_of_file = true;
      decode = false;
      return;
    }
    Pending p;
    p.type = static_cast<char>(in.u64());
    p.decoded = in.u64() != 0;
    p.u = in.count();
    p.first = unpack_record(in);
    p.second = unpack_record(in);

    info.type = p.type;
    if (p.decoded) {
      info.user = p.second.user;
      switch (p.type) {
        case 'B': info.size = p.u; break;
        case 'A': info.count = p.second.count; info.size = p.u; break;
        default: info.count = p.second.count; break;
      }
    } else {
      info.user = p.first.user;
      switch (p.type) {
        case 'B': info.size = p.first.size; break;
        case 'A': info.count = p.first.count; info.size = p.first.size; break;
        case 'V': info.count = p.first.count; break;
        default: break;
      }
    }
    decode = p.decoded;
    f.pending = std::move(p);
  });
}

Status File::read_inline_data(std::optional<std::span<char>> out, int root) {
  return guarded([&](Impl& f) {
    f.sync(Packer().str("i").u64(static_cast<std::uint64_t>(root)).take(), [&] {
      if (!f.pending || f.pending->type != 'I') usage(Errc::call_sequence, "no inline section pending");
      if (root < 0 || root >= f.size) usage(Errc::root_out_of_range, "root rank out of range");
      if (f.rank == root && out) {
        if (out->size() != kInlineDataBytes) usage(Errc::length_mismatch, "inline buffer must be 32 bytes");
        f.storage->read_at(f.pending->first.payload_offset, *out);
      }
      return std::string();
    });
    f.cursor = f.pending->first.end;
    f.pending.reset();
  });
}

Status File::read_block_data(std::optional<std::span<char>> out, Count size, int root) {
  return guarded([&](Impl& f) {
    f.sync(Packer().str("b").count(size).u64(static_cast<std::uint64_t>(root)).take(), [&] {
      if (!f.pending || f.pending->type != 'B') usage(Errc::call_sequence, "no block section pending");
      if (root < 0 || root >= f.size) usage(Errc::root_out_of_range, "root rank out of range");
      const Pending& p = *f.pending;
      const Count expected = p.decoded ? p.u : p.first.size;
      if (size != expected) usage(Errc::length_mismatch, "block size differs from the section header");
      if (f.rank != root || !out) return std::string();
      if (out->size() != size) usage(Errc::length_mismatch, "output buffer has the wrong size");
      const SectionRecord& rec = p.data();
      std::string bytes = f.read(rec.payload_offset, rec.payload_length);
      if (p.decoded) {
        bytes = decompress_element(bytes);
        if (bytes.size() != size) throw DecodeError(Errc::size_mismatch, "block size mismatch");
      }
      std::copy(bytes.begin(), bytes.end(), out->begin());
      return std::string();
    });
    f.cursor = f.pending->data().end;
    f.pending.reset();
  });
}

Status File::read_array_data(const ArrayOutput& out, std::span<const std::uint64_t> counts,
                             std::uint64_t element_size) {
  return guarded([&](Impl& f) {
    const std::string params = Packer().str("a").u64s(counts).u64(element_size).take();
    const auto gathered = f.sync(params, [&] {
      if (!f.pending || f.pending->type != 'A' || f.pending->sizes_done) {
        usage(Errc::call_sequence, "no fixed-size array section pending");
      }
      Pending& p = *f.pending;
      const SectionRecord& head = p.decoded ? p.second : p.first;
      check_partition(counts, f.size, head.count);
      if (element_size != (p.decoded ? p.u : p.first.size)) {
        usage(Errc::length_mismatch, "element size differs from the section header");
      }
      const std::uint64_t mine = counts[static_cast<std::size_t>(f.rank)];
      p.my_sizes.assign(mine, element_size);
      check_output(out, p.my_sizes);
      if (!p.decoded) {
        if (!std::holds_alternative<std::monostate>(out)) {
          const std::string window = f.read(p.first.payload_offset + prefix(counts, f.rank) * element_size,
                                            mine * element_size);
          std::vector<std::string> elements;
          for (auto v : split_fixed(window, mine, element_size)) elements.emplace_back(v);
          scatter(out, elements);
        }
        return std::string();
      }
      p.my_file_sizes = f.read_size_window(p.second, counts, kByteSizeLetter);
      return Packer().u64(sum_u64(p.my_file_sizes, Errc::count_overflow)).take();
    });
    Pending& p = *f.pending;
    if (!p.decoded) {
      f.cursor = p.first.end;
      f.pending.reset();
      return;
    }
    for (const auto& g : gathered) p.file_bytes.push_back(Unpacker(g).u64());
    ArrayLayout layout;
    layout.type = 'V';
    layout.counts.assign(counts.begin(), counts.end());
    layout.rank_bytes = p.file_bytes;
    const std::uint64_t end = layout.end(p.second.offset);
    f.sync({}, [&] {
      if (end > f.storage->size()) throw FormatError("compressed array is truncated", Errc::truncated);
      if (std::holds_alternative<std::monostate>(out)) return std::string();
      const std::string window = f.read(p.second.payload_offset + prefix(p.file_bytes, f.rank),
                                        p.file_bytes[static_cast<std::size_t>(f.rank)]);
      const auto elements = decompress_elements(split_sizes(window, p.my_file_sizes));
      for (const auto& e : elements) {
        if (e.size() != element_size) throw DecodeError(Errc::size_mismatch, "array element size mismatch");
      }
      scatter(out, elements);
      return std::string();
    });
    f.cursor = end;
    f.pending.reset();
  });
}

Status File::read_varray_sizes(std::optional<std::span<std::uint64_t>> sizes,
                               std::span<const std::uint64_t> counts) {
  return guarded([&](Impl& f) {
    const auto gathered = f.sync(Packer().str("s").u64s(counts).take(), [&] {
      if (!f.pending || (f.pending->type != 'V' && f.pending->type != 'A') || f.pending->sizes_done) {
        usage(Errc::call_sequence, "no array section pending");
      }
      Pending& p = *f.pending;
      const SectionRecord& head = p.decoded ? p.second : p.first;
      check_partition(counts, f.size, head.count);
      const std::uint64_t mine = counts[static_cast<std::size_t>(f.rank)];
      if (sizes && sizes->size() != mine) usage(Errc::length_mismatch, "size buffer has the wrong length");

      if (p.type == 'V' && p.decoded) {
        p.my_sizes = f.read_size_window(p.first, counts, kUncompressedLetter);
      } else if (p.type == 'V') {
        p.my_sizes = f.read_size_window(p.first, counts, kByteSizeLetter);
      } else {
        const Count e = p.decoded ? p.u : p.first.size;
        p.my_sizes.assign(mine, to_u64(e, Errc::count_overflow, "element size does not fit into 64 bits"));
      }
      if (p.decoded) {
        p.my_file_sizes = f.read_size_window(p.second, counts, kByteSizeLetter);
      } else {
        p.my_file_sizes = p.my_sizes;
      }
      return Packer()
          .u64(sum_u64(p.my_sizes, Errc::count_overflow))
          .u64(sum_u64(p.my_file_sizes, Errc::count_overflow))
          .take();
    });
    Pending& p = *f.pending;
    for (const auto& g : gathered) {
      Unpacker in(g);
      p.logical_bytes.push_back(in.u64());
      p.file_bytes.push_back(in.u64());
    }
    p.counts.assign(counts.begin(), counts.end());
    p.sizes_done = true;
    if (sizes) std::copy(p.my_sizes.begin(), p.my_sizes.end(), sizes->begin());
  });
}

Status File::read_varray_data(const ArrayOutput& out, std::span<const std::uint64_t> counts,
                              std::span<const std::uint64_t> local_sizes,
                              std::span<const std::uint64_t> rank_bytes) {
  return guarded([&](Impl& f) {
    std::uint64_t end = 0;
    f.sync(Packer().str("d").u64s(counts).u64s(rank_bytes).take(), [&] {
      if (!f.pending || !f.pending->sizes_done) usage(Errc::call_sequence, "element sizes have not been read");
      Pending& p = *f.pending;
      if (!std::equal(counts.begin(), counts.end(), p.counts.begin(), p.counts.end())) {
        usage(Errc::partition_mismatch, "partition differs from the one used to read the sizes");
      }
      if (!std::equal(rank_bytes.begin(), rank_bytes.end(), p.logical_bytes.begin(), p.logical_bytes.end())) {
        usage(Errc::length_mismatch, "per-rank byte counts do not match the element sizes");
      }
      const SectionRecord& rec = p.data();
      if (rec.kind == SectionKind::array) {
        end = rec.end;
      } else {
        ArrayLayout layout;
        layout.type = 'V';
        layout.counts = p.counts;
        layout.rank_bytes = p.file_bytes;
        end = layout.end(rec.offset);
      }
      if (end > f.storage->size()) throw FormatError("array section is truncated", Errc::truncated);
      if (std::holds_alternative<std::monostate>(out)) return std::string();
      if (!std::equal(local_sizes.begin(), local_sizes.end(), p.my_sizes.begin(), p.my_sizes.end())) {
        usage(Errc::length_mismatch, "element sizes differ from those read");
      }
      check_output(out, p.my_sizes);
      const std::string window =
          f.read(rec.payload_offset + prefix(p.file_bytes, f.rank), p.file_bytes[static_cast<std::size_t>(f.rank)]);
      const auto views = split_sizes(window, p.my_file_sizes);
      std::vector<std::string> elements;
      if (p.decoded) {
        elements = decompress_elements(views);
        for (std::size_t i = 0; i < elements.size(); ++i) {
          if (elements[i].size() != p.my_sizes[i]) {
            throw DecodeError(Errc::size_mismatch, "array element size mismatch");
          }
        }
      } else {
        elements.assign(views.begin(), views.end());
      }
      scatter(out, elements);
      return std::string();
    });
    f.cursor = end;
    f.pending.reset();
  });
}

}  // namespace scda

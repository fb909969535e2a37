#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "manifest.hpp"
#include "scda/codec.hpp"
#include "scda/compress.hpp"
#include "scda/file.hpp"
#include "scda/kernels.hpp"
#include "scda/parsim.hpp"
#include "scda/validate.hpp"

namespace scda::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_message(Errc code) {
  char buf[128];
  std::size_t len = 0;
  if (ferror_string(static_cast<int>(code), buf, len) != 0) return "unknown error";
  return std::string(buf, len);
}

int fail(std::ostream& err, const Error& e) {
  err << "scda: " << code_message(e.code()) << ": " << e.what() << "\n";
  return group_of(e.code()) == ErrorGroup::file_system ? kExitIo : kExitInvalid;
}

// A file opened for random-access reading.
struct Input {
  explicit Input(const fs::path& path)
      : storage(DiskMedium(path).open(AccessMode::read, false)), source(*storage) {}
  std::unique_ptr<Storage> storage;
  StorageSource source;
};

std::string hex_version(int v) {
  static constexpr char digits[] = "0123456789abcdef";
  return {digits[(v >> 4) & 15], digits[v & 15]};
}

struct SizeSummary {
  Count total = 0;
  Count min = 0;
  Count max = 0;
};

SizeSummary summarize(const std::vector<Count>& sizes) {
  SizeSummary s;
  if (sizes.empty()) return s;
  s.min = *std::min_element(sizes.begin(), sizes.end());
  s.max = *std::max_element(sizes.begin(), sizes.end());
  for (auto e : sizes) s.total += e;
  return s;
}

int cmd_info(const fs::path& path, bool decode, bool as_json, std::ostream& out, std::ostream& err) {
  try {
    Input in(path);
    const FileIndex index = index_file(in.source);
    const auto sections = logical_sections(in.source, index, decode);
    if (as_json) {
      json doc;
      doc["version"] = hex_version(index.header.version);
      doc["vendor_b64"] = base64_encode(index.header.vendor);
      doc["user_b64"] = base64_encode(index.header.user);
      doc["decode"] = decode;
      json list = json::array();
      for (std::size_t i = 0; i < sections.size(); ++i) {
        const auto& s = sections[i];
        json j;
        j["index"] = i;
        j["type"] = std::string(1, letter(s.kind));
        j["raw_type"] = std::string(1, letter(index.sections[s.first_raw].kind));
        j["compressed"] = s.compressed;
        j["user_b64"] = base64_encode(s.user);
        j["count"] = to_decimal(s.count);
        if (s.kind == SectionKind::varray) {
          const SizeSummary sum = summarize(s.sizes);
          j["sizes"] = {{"total", to_decimal(sum.total)}, {"min", to_decimal(sum.min)}, {"max", to_decimal(sum.max)}};
        } else {
          j["size"] = to_decimal(s.size);
        }
        j["offset"] = s.offset;
        j["length"] = s.length;
        list.push_back(std::move(j));
      }
      doc["sections"] = std::move(list);
      out << doc.dump(2) << "\n";
      return kExitOk;
    }
    out << "scdata version " << hex_version(index.header.version) << ", vendor \"" << escape(index.header.vendor)
        << "\", user \"" << escape(index.header.user) << "\"\n";
    out << sections.size() << (sections.size() == 1 ? " section" : " sections") << "\n";
    for (std::size_t i = 0; i < sections.size(); ++i) {
      const auto& s = sections[i];
      out << i << ": " << letter(s.kind);
      if (s.compressed) out << " (compressed)";
      out << " \"" << escape(s.user) << "\"";
      switch (s.kind) {
        case SectionKind::inline_data: break;
        case SectionKind::block: out << " E=" << to_decimal(s.size); break;
        case SectionKind::array: out << " N=" << to_decimal(s.count) << " E=" << to_decimal(s.size); break;
        case SectionKind::varray: {
          const SizeSummary sum = summarize(s.sizes);
          out << " N=" << to_decimal(s.count) << " bytes=" << to_decimal(sum.total);
          if (!s.sizes.empty()) out << " E=[" << to_decimal(sum.min) << ".." << to_decimal(sum.max) << "]";
          break;
        }
      }
      out << " offset=" << s.offset << " length=" << s.length << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int cmd_validate(const fs::path& path, bool strict, std::ostream& out, std::ostream& err) {
  try {
    Input in(path);
    const ValidationReport report = validate(in.source, strict);
    if (report.valid()) {
      out << "valid: " << report.sections << (report.sections == 1 ? " section" : " sections");
      if (report.style) out << ", " << (*report.style == LineStyle::Unix ? "unix" : "mime") << " style";
      out << "\n";
      return kExitOk;
    }
    const Violation& v = *report.violation;
    out << "invalid at byte " << v.offset << ": " << v.reason << " (" << code_message(v.code) << ")\n";
    return kExitInvalid;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f.flush()) throw IoError(Errc::fs_write, "cannot write " + path.string());
}

int cmd_extract(const fs::path& path, std::size_t which, bool decode, const fs::path& dir, std::ostream& out,
                std::ostream& err) {
  try {
    Input in(path);
    const FileIndex index = index_file(in.source);
    const auto sections = logical_sections(in.source, index, decode);
    if (which >= sections.size()) {
      throw Error(Errc::invalid_argument, "section index " + std::to_string(which) + " out of range, file has " +
                                              std::to_string(sections.size()) + " sections");
    }
    const LogicalSection& s = sections[which];
    const std::string payload = logical_payload(in.source, index, s);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(Errc::fs_open, "cannot create " + dir.string() + ": " + ec.message());
    if (s.kind == SectionKind::varray) {
      const auto elements = split_sizes(payload, s.sizes);
      for (std::size_t i = 0; i < elements.size(); ++i) {
        write_file(dir / ("elem_" + std::to_string(i) + ".bin"), elements[i]);
      }
      out << "wrote " << elements.size() << " element files to " << dir.string() << "\n";
    } else {
      const fs::path target = dir / ("section_" + std::to_string(which) + ".bin");
      write_file(target, payload);
      out << "wrote " << payload.size() << " bytes to " << target.string() << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

void check(const Status& st) {
  if (!st.ok()) throw Error(st.code, st.detail);
}

int cmd_create(const fs::path& manifest_path, const fs::path& output, LineStyle style, bool encode, int level,
               std::ostream& out, std::ostream& err) {
  Manifest m;
  try {
    m = load_manifest(manifest_path);
  } catch (const ManifestError& e) {
    err << "scda: " << manifest_path.string() << ":" << e.what() << "\n";
    return kExitInvalid;
  }
  try {
    World world(1);
    world.run([&](Comm& comm) {
      Status st;
      std::string user = m.user;
      File f = File::open(comm, output, 'w', user, st, FileOptions{style, level});
      check(st);
      for (const ManifestEntry& e : m.entries) {
        const bool enc = e.encode.value_or(encode && e.type != 'I');
        switch (e.type) {
          case 'I': st = f.write_inline(e.data, e.user, 0); break;
          case 'B': st = f.write_block(e.data, e.data.size(), e.user, 0, enc); break;
          case 'A': {
            const std::uint64_t counts[] = {e.count};
            st = f.write_array(std::string_view(e.data), counts, e.element_size, e.user, enc);
            break;
          }
          default: {
            const std::uint64_t counts[] = {e.sizes.size()};
            const std::uint64_t bytes[] = {e.data.size()};
            st = f.write_varray(std::string_view(e.data), counts, e.sizes, bytes, e.user, enc);
          }
        }
        if (!st.ok()) throw Error(st.code, "line " + std::to_string(e.line) + ": " + st.detail);
      }
      check(f.close());
    });
    out << "wrote " << m.entries.size() << (m.entries.size() == 1 ? " section" : " sections") << " to "
        << output.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int cmd_selftest(std::size_t cases, int max_ranks, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  struct Suite {
    const char* name;
    parsim::SuiteReport report;
  };
  const Suite suites[] = {
      {"partition independence", parsim::fuzz_partition_independence(cases, max_ranks, seed)},
      {"repartitioned reads", parsim::fuzz_read_back(cases, max_ranks, seed)},
      {"fault injection", parsim::fuzz_faults(cases, max_ranks, seed)},
  };
  std::size_t failed = 0;
  for (const auto& s : suites) {
    out << s.name << ": " << s.report.passed << " passed, " << s.report.failed << " failed\n";
    for (const auto& f : s.report.failures) out << "  replay " << f << "\n";
    failed += s.report.failed;
  }
  out << (failed == 0 ? "PASS" : "FAIL") << " (seed " << seed << ", " << cases << " cases, up to " << max_ranks
      << " ranks)\n";
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "selftest took " << secs << " s\n";
  return failed == 0 ? kExitOk : kExitInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inspect, validate, extract, create and self-test scda files", "scda"};
  app.require_subcommand(1);

  bool decode = false;
  bool as_json = false;
  bool strict = false;
  bool encode = false;
  std::string path;
  std::string output = ".";
  std::string style_name = "unix";
  int level = kBestLevel;
  std::size_t index = 0;
  std::size_t cases = 200;
  int max_ranks = 8;
  std::uint64_t seed = 1;

  auto* info = app.add_subcommand("info", "List the file header and all sections");
  info->add_option("file", path, "scda file")->required();
  info->add_flag("--decode", decode, "Fold compressed pairs into logical sections");
  info->add_flag("--json", as_json, "Machine-readable output");

  auto* check_cmd = app.add_subcommand("validate", "Check conformance; exit 1 if invalid, 2 on I/O errors");
  check_cmd->add_option("file", path, "scda file")->required();
  check_cmd->add_flag("--strict", strict, "Also require one line style and conforming compression wrappers");

  auto* extract = app.add_subcommand("extract", "Write one section's payload to files");
  extract->add_option("file", path, "scda file")->required();
  extract->add_option("index", index, "Section index as listed by info")->required();
  extract->add_flag("--decode", decode, "Decompress compressed pairs");
  extract->add_option("-o,--output", output, "Output directory");

  auto* create = app.add_subcommand("create", "Build a file from a manifest");
  create->add_option("manifest", path, "Manifest file")->required();
  create->add_option("-o,--output", output, "Output file")->required();
  create->add_option("--style", style_name, "Line style")->check(CLI::IsMember({"unix", "mime"}));
  create->add_flag("--encode", encode, "Compress B, A and V sections");
  create->add_option("--level", level, "zlib level, 0 stores")->check(CLI::Range(-1, 9));

  auto* selftest = app.add_subcommand("selftest", "Run the virtual-rank fuzz suites");
  selftest->add_option("--cases", cases, "Cases per suite");
  selftest->add_option("--max-ranks", max_ranks, "Largest rank count")->check(CLI::Range(1, 64));
  selftest->add_option("--seed", seed, "Seed of the first case");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (*info) return cmd_info(path, decode, as_json, out, err);
  if (*check_cmd) return cmd_validate(path, strict, out, err);
  if (*extract) return cmd_extract(path, index, decode, output, out, err);
  if (*create) {
    return cmd_create(path, output, style_name == "mime" ? LineStyle::Mime : LineStyle::Unix, encode, level, out,
                      err);
  }
  return cmd_selftest(cases, max_ranks, seed, out, err);
}

}  // namespace scda::cli

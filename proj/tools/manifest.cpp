#include "manifest.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "scda/count.hpp"
#include "scda/wire.hpp"

namespace scda::cli {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line, std::string_view key) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw ManifestError(line, "invalid number for " + std::string(key) + ": '" + std::string(s) + "'");
  }
  return v;
}

std::string read_file(const std::filesystem::path& path, std::size_t line) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(line, "cannot read payload file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Splits the remainder of a line into key=value words.
std::map<std::string, std::string> parse_keys(std::string_view rest, std::size_t line) {
  std::map<std::string, std::string> keys;
  std::istringstream words{std::string(rest)};
  std::string word;
  while (words >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos || eq == 0) throw ManifestError(line, "expected key=value, got '" + word + "'");
    const std::string key = word.substr(0, eq);
    if (keys.count(key)) throw ManifestError(line, "duplicate key " + key);
    keys[key] = word.substr(eq + 1);
  }
  return keys;
}

}  // namespace

std::string escape(std::string_view bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : bytes) {
    if (c == '\\' || c == '"') {
      out.push_back('\\');
      out.push_back(static_cast<char>(c));
    } else if (c >= 32 && c < 127) {
      out.push_back(static_cast<char>(c));
    } else {
      out += "\\x";
      out.push_back(digits[c >> 4]);
      out.push_back(digits[c & 15]);
    }
  }
  return out;
}

std::string unescape(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\') {
      out.push_back(text[i]);
      continue;
    }
    if (++i == text.size()) throw std::invalid_argument("dangling backslash");
    switch (text[i]) {
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case 'x': {
        const int hi = i + 1 < text.size() ? hex_digit(text[i + 1]) : -1;
        const int lo = i + 2 < text.size() ? hex_digit(text[i + 2]) : -1;
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid \\x escape");
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        break;
      }
      default: throw std::invalid_argument(std::string("unknown escape \\") + text[i]);
    }
  }
  return out;
}

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base) {
  Manifest m;
  std::size_t line_no = 0;
  bool seen_data = false;
  bool seen_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    line.remove_prefix(first);

    const char type = line[0];
    if (std::string_view("FIBAV").find(type) == std::string_view::npos || line.size() < 2 ||
        (line[1] != ' ' && line[1] != '\t')) {
      throw ManifestError(line_no, "expected a section letter F, I, B, A or V");
    }
    std::string_view rest = line.substr(2);
    rest.remove_prefix(std::min(rest.find_first_not_of(" \t"), rest.size()));
    if (rest.empty() || rest[0] != '"') throw ManifestError(line_no, "expected a quoted user string");
    std::size_t close = 1;
    while (close < rest.size() && rest[close] != '"') close += rest[close] == '\\' ? 2 : 1;
    if (close >= rest.size()) throw ManifestError(line_no, "unterminated user string");
    std::string user;
    try {
      user = unescape(rest.substr(1, close - 1));
    } catch (const std::invalid_argument& e) {
      throw ManifestError(line_no, std::string("user string: ") + e.what());
    }
    if (user.size() > kMaxUserBytes) throw ManifestError(line_no, "user string exceeds 58 bytes");
    auto keys = parse_keys(rest.substr(close + 1), line_no);

    if (type == 'F') {
      if (seen_data || seen_header) throw ManifestError(line_no, "F line must come first and only once");
      if (!keys.empty()) throw ManifestError(line_no, "F line takes no keys");
      m.user = std::move(user);
      seen_header = true;
      continue;
    }
    seen_data = true;
    ManifestEntry e;
    e.line = line_no;
    e.type = type;
    e.user = std::move(user);
    const auto take = [&](const std::string& key) -> std::optional<std::string> {
      auto it = keys.find(key);
      if (it == keys.end()) return std::nullopt;
      std::string v = std::move(it->second);
      keys.erase(it);
      return v;
    };
    if (auto enc = take("encode")) {
      if (*enc == "yes") {
        e.encode = true;
      } else if (*enc == "no") {
        e.encode = false;
      } else {
        throw ManifestError(line_no, "encode must be yes or no");
      }
      if (type == 'I' && *e.encode) throw ManifestError(line_no, "inline sections cannot be encoded");
    }
    const auto data = take("data");
    const auto txt = take("text");
    if (data && txt) throw ManifestError(line_no, "give either data= or text=, not both");
    if (data) {
      e.data = read_file(base / *data, line_no);
    } else if (txt && (type == 'I' || type == 'B')) {
      try {
        e.data = unescape(*txt);
      } catch (const std::invalid_argument& ex) {
        throw ManifestError(line_no, std::string("text: ") + ex.what());
      }
    } else if (txt) {
      throw ManifestError(line_no, "text= is only allowed for I and B lines");
    } else if (type != 'A' && type != 'V') {
      throw ManifestError(line_no, "missing data= or text=");
    }

    switch (type) {
      case 'I':
        if (e.data.size() != kInlineDataBytes) {
          throw ManifestError(line_no, "inline payload has " + std::to_string(e.data.size()) +
                                           " bytes instead of 32");
        }
        break;
      case 'A': {
        const auto n = take("N");
        const auto size = take("E");
        if (!n || !size) throw ManifestError(line_no, "A line needs N= and E=");
        e.count = parse_u64(*n, line_no, "N");
        e.element_size = parse_u64(*size, line_no, "E");
        const unsigned __int128 want = static_cast<unsigned __int128>(e.count) * e.element_size;
        if (want != e.data.size()) {
          throw ManifestError(line_no, "payload has " + std::to_string(e.data.size()) + " bytes but N*E is " +
                                           to_decimal(want));
        }
        break;
      }
      case 'V': {
        const auto sizes = take("sizes");
        if (!sizes) throw ManifestError(line_no, "V line needs sizes=");
        unsigned __int128 total = 0;
        std::string_view list(*sizes);
        while (!list.empty()) {
          const auto comma = list.find(',');
          e.sizes.push_back(parse_u64(list.substr(0, comma), line_no, "sizes"));
          total += e.sizes.back();
          if (comma == std::string_view::npos) break;
          list.remove_prefix(comma + 1);
          if (list.empty()) throw ManifestError(line_no, "trailing comma in sizes");
        }
        if (total != e.data.size()) {
          throw ManifestError(line_no, "payload has " + std::to_string(e.data.size()) +
                                           " bytes but the sizes sum to " + to_decimal(total));
        }
        break;
      }
      default: break;
    }
    if (!keys.empty()) throw ManifestError(line_no, "unknown key " + keys.begin()->first);
    m.entries.push_back(std::move(e));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(0, "cannot read manifest " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_manifest(os.str(), path.parent_path());
}

}  // namespace scda::cli

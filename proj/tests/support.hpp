#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace scda::test {

inline std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(SCDA_GOLDEN_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scda_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace scda::test

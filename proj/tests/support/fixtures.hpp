// Fixture file helpers shared by unit and acceptance tests.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mao::testing {

inline std::filesystem::path fixture_root() { return MAO_FIXTURES; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Regular files in `dir`, sorted by name.
inline std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                                     const std::string& extension = {}) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (!extension.empty() && e.path().extension() != extension) continue;
    out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Faulty validator fixtures are named "<CODE>_<what>.bpmt".
inline std::string expected_code(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  return stem.substr(0, stem.find('_'));
}

}  // namespace mao::testing

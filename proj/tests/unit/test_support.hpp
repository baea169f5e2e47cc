#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "semtex/diagnostics.hpp"
#include "semtex/modsys.hpp"
#include "semtex/syntax.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(SEMTEX_FIXTURES) / rel;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// In-memory source tree keyed by absolute path.
struct MemoryFiles {
  std::map<std::string, std::string> files;

  MemoryFiles() = default;
  MemoryFiles(std::initializer_list<std::pair<const std::string, std::string>> init) : files(init) {}

  semtex::modsys::Loader loader() const {
    return [this](const std::filesystem::path& p) {
      auto it = files.find(p.string());
      if (it == files.end()) throw semtex::Error(semtex::ErrorKind::Io, "cannot read '" + p.string() + "'");
      return semtex::syntax::parse_document(it->second, p.string());
    };
  }
};

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("semtex-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testing

#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "heurlab/instance_io.hpp"

#ifndef HEURLAB_FIXTURE_DIR
#error "HEURLAB_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace heurlab::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(HEURLAB_FIXTURE_DIR) / name;
}

inline std::string read_fixture(const std::string& name) { return read_text(fixture_path(name)); }

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("heurlab-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace heurlab::testing

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace ladder::testing {

// Unique directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 gen(std::random_device{}());
    auto base = std::filesystem::temp_directory_path();
    for (;;) {
      path_ = base / ("ladder-test-" + std::to_string(gen()));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path fixture_dir() { return LADDER_FIXTURE_DIR; }
inline std::filesystem::path data_dir() { return LADDER_DATA_DIR; }

}  // namespace ladder::testing

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>

#include "tmeval/csv.hpp"

namespace tmeval::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view name) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("tmeval_" + std::string(name) + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view leaf) const { return path_ / leaf; }

  std::filesystem::path write(std::string_view leaf, std::string_view text) const {
    const auto p = path_ / leaf;
    csv::write_text(p, text);
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace tmeval::testing

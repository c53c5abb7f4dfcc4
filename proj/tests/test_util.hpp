#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "pars/dataset.hpp"
#include "pars/rng.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pars_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline pars::Dataset random_dataset(pars::Rng& rng, std::size_t rows, std::size_t n_numeric,
                                    std::size_t n_categorical, int n_tokens = 3) {
  pars::Dataset d;
  for (std::size_t i = 0; i < n_numeric; ++i)
    d.schema.features.push_back({"num" + std::to_string(i), pars::FeatureKind::Numeric});
  for (std::size_t i = 0; i < n_categorical; ++i)
    d.schema.features.push_back({"cat" + std::to_string(i), pars::FeatureKind::Categorical});
  for (std::size_t r = 0; r < rows; ++r) {
    pars::Instance row;
    for (std::size_t i = 0; i < n_numeric; ++i) row.emplace_back(rng.uniform(-10.0, 10.0));
    for (std::size_t i = 0; i < n_categorical; ++i)
      row.emplace_back("t" + std::to_string(rng.below(static_cast<std::uint64_t>(n_tokens))));
    d.rows.push_back(std::move(row));
  }
  return d;
}

}  // namespace testutil

#ifndef MCCA_TEST_UTIL_HPP
#define MCCA_TEST_UTIL_HPP

#include <atomic>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "mcca/mcca.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "mcca_test";
    if (info != nullptr) name += std::string("_") + info->test_suite_name() + "_" + info->name();
    name += "_" + std::to_string(counter++);
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline mcca::Matrix random_matrix(mcca::Index rows, mcca::Index cols, std::uint64_t seed) {
  mcca::Rng rng(seed);
  return mcca::gaussian_matrix(rows, cols, rng);
}

inline double max_abs(const mcca::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

template <class Fn>
mcca::ErrorKind error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const mcca::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected mcca::Error";
  return mcca::ErrorKind::Usage;
}

template <class Fn>
std::string error_message_of(Fn&& fn) {
  try {
    fn();
  } catch (const mcca::Error& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected mcca::Error";
  return {};
}

}  // namespace testutil

#endif  // MCCA_TEST_UTIL_HPP

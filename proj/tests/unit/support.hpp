#pragma once

#include "nestquad/nestquad.hpp"
#include "oracle.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

struct NamedFamily {
  std::string name;
  nestquad::WeightFamily family;
  oracle::Density density;
};

inline std::vector<NamedFamily> builtin_families() {
  using nestquad::WeightFamily;
  using oracle::Weight;
  return {
      {"legendre", WeightFamily::legendre(), {Weight::Legendre}},
      {"chebyshev", WeightFamily::chebyshev(), {Weight::Chebyshev}},
      {"jacobi_0_0.3", WeightFamily::jacobi(0.0, 0.3), {Weight::Jacobi, 0.0, 0.3}},
      {"jacobi_-0.5_1.5", WeightFamily::jacobi(-0.5, 1.5), {Weight::Jacobi, -0.5, 1.5}},
      {"hermite_0", WeightFamily::hermite(0.0), {Weight::Hermite, 0.0}},
      {"hermite_1", WeightFamily::hermite(1.0), {Weight::Hermite, 1.0}},
      {"laguerre_0", WeightFamily::laguerre(0.0), {Weight::Laguerre, 0.0}},
      {"laguerre_0.5", WeightFamily::laguerre(0.5), {Weight::Laguerre, 0.5}},
  };
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("nestquad-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
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

}  // namespace testing_support

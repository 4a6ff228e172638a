// SPDX-License-Identifier: Apache-2.0
//
// Seeded Gaussian stream: std::mt19937_64 (bit-stable sequence by the
// standard) feeding an explicit Box-Muller transform, so the generated
// noise depends only on the seed and the libm in use -- never on
// std::normal_distribution's unspecified algorithm.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace capharm {

// splitmix64 step; used to derive independent sub-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // in [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1): u1<1 so arg>0
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace capharm

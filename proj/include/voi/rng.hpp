#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

namespace voi {

// SplitMix64 (Steele, Lea & Flood 2014) with cheap substream forking.
//
// The substream for index i of a run seeded with s starts from
// scramble(s + GOLDEN * (i + 1)), so the stream consumed by draw i is the
// same whether draws are processed serially or in parallel. Tests pin
// expected outputs by seed; the stream definition itself is the
// reproducibility contract.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  SplitMix64(std::uint64_t seed, std::uint64_t stream)
      : state_(scramble(seed + kGolden * (stream + 1))) {}

  std::uint64_t next() {
    state_ += kGolden;
    return scramble(state_);
  }

  // Uniform on (0, 1]; never 0 so log() stays finite.
  double uniform_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via the Box-Muller cosine branch; consumes two words.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(int length) {
    Eigen::VectorXd z(length);
    for (int i = 0; i < length; ++i) z[i] = normal();
    return z;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace voi

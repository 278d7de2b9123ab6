#pragma once

#include <cstdint>
#include <random>

namespace anderson_lab::spectral {

/// splitmix64 finalizer; used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Key of stream `index` under `seed`. Draw i of a run with seed s always
/// uses stream_key(s, i), so results do not depend on execution order.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x5851f42d4c957f2dULL));
}

/// Gaussian source for one stream.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t index) : engine_(stream_key(seed, index)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace anderson_lab::spectral

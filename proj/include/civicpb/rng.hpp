#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

namespace civicpb {

// Seeded random source. Only the raw mt19937_64 output is used (its sequence
// is fixed by the standard), so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  double normal();

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent seed for a named substream ("split", "smote", ...).
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);

}  // namespace civicpb

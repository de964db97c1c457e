#pragma once

#include <cstdint>
#include <vector>

namespace shiftlab {

// splitmix64: deterministic across platforms, good enough for probe suites.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  std::vector<double> uniform_vector(int n, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kDefaultProbeSeed = 0xC0FFEEULL;

}  // namespace shiftlab

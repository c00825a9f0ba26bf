#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace adlens {

// SplitMix64. Self-contained so generated fixtures are byte-identical across
// platforms and standard-library versions (std distributions are not
// portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n); n > 0
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // uniform in [lo, hi] inclusive
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[below(i)]);
  }

  // k distinct indices from [0, n), ascending
  std::vector<size_t> sample_indices(size_t n, size_t k) {
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = i;
    shuffle(all);
    all.resize(k < n ? k : n);
    std::sort(all.begin(), all.end());
    return all;
  }

 private:
  std::uint64_t state_;
};

}  // namespace adlens

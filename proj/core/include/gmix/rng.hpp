#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace gmix {

/// splitmix64 output mixer.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed-splitting rule used throughout the experiment harness: the k-th
/// output of a splitmix64 stream started at `base`. Changing one index
/// changes one derived stream and nothing else.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64_mix(base + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

/// xoshiro256++ with splitmix64 seeding. Fully specified here so that
/// simulated replicates are reproducible across platforms and compilers,
/// unlike the standard-library distributions.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) {
      sm += 0x9e3779b97f4a7c15ULL;
      word = splitmix64_mix(sm);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Inclusive range. Modulo bias is ~2^-64 per draw, irrelevant here.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller (cosine branch only; two uniforms per
  /// draw, no hidden state).
  double normal() {
    double u1 = uniform01();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Laplace with the given scale (variance = 2 scale^2).
  double laplace(double scale) {
    const double u = uniform01() - 0.5;
    double t = 1.0 - 2.0 * std::abs(u);
    if (t < 0x1.0p-53) t = 0x1.0p-53;
    const double mag = -scale * std::log(t);
    return u < 0.0 ? -mag : mag;
  }

  /// Student t with 3 degrees of freedom, unit scale (variance = 3).
  double student_t3() {
    const double z = normal();
    const double z1 = normal();
    const double z2 = normal();
    const double z3 = normal();
    const double chisq3 = z1 * z1 + z2 * z2 + z3 * z3;
    return z / std::sqrt(chisq3 / 3.0);
  }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      const int j = uniform_int(0, i);
      std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
    }
  }

  /// Random permutation of {0, ..., k-1}.
  std::vector<int> permutation(int k) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    shuffle(idx);
    return idx;
  }

  /// Sorted random subset of size k from {0, ..., m-1}.
  std::vector<int> subset(int m, int k);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

inline std::vector<int> Xoshiro256pp::subset(int m, int k) {
  std::vector<int> idx = permutation(m);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace gmix

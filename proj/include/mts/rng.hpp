#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mts {

namespace detail {

// FNV-1a over the bytes of a label.  Used only to fold human-readable path
// segments into seed material, never as a general hash.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// splitmix64 finalizer: cheap, well-mixed, and stable across platforms.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Deterministic random stream with a hand-rolled splitmix64 core.  All
// distributions are implemented here rather than via <random> so that byte
// streams are identical across standard libraries and compiler versions.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the spare value is cached so consecutive
  // calls consume uniforms in a fixed pattern.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]: keeps log() finite
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Unbiased integer in [0, n).  n == 0 is the caller's bug; we keep the
  // check cheap and defined.
  std::size_t index(std::size_t n) {
    if (n <= 1) return 0;
    std::uint64_t span = static_cast<std::uint64_t>(n);
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::size_t>(x % span);
  }

  // Fisher-Yates shuffle driven by index(); stable across platforms.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Immutable node in a seed-derivation tree.  Every randomized component takes
// a SeededRng and derives private children by label, so adding or reordering
// unrelated components never perturbs another component's stream.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t master_seed)
      : seed_(detail::mix64(master_seed)), path_("root") {}

  // Child node: mixes the label into the seed and extends the debug path.
  SeededRng child(std::string_view label) const {
    std::uint64_t folded = detail::mix64(seed_ ^ detail::fnv1a64(label));
    std::string p = path_;
    p += '/';
    p += label;
    return SeededRng(folded, std::move(p));
  }

  // Fresh stream for actual draws; repeated calls return identical streams.
  RandomStream stream() const { return RandomStream(seed_); }

  std::uint64_t seed() const { return seed_; }
  const std::string& path() const { return path_; }

 private:
  SeededRng(std::uint64_t seed, std::string path)
      : seed_(seed), path_(std::move(path)) {}

  std::uint64_t seed_;
  std::string path_;
};

}  // namespace mts

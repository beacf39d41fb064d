#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace crudesched {

/// Named random streams. Every run expands one 64-bit seed into these so
/// that each consumer draws from an independent, reproducible sequence.
enum class Stream : std::uint64_t {
  kInit = 1,
  kGlobal = 2,
  kLocal = 3,
  kGenerator = 4,
  kBench = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Thin wrapper over mt19937_64. The real and integer draws are coded here
/// rather than through <random> distributions, whose output is
/// implementation-defined, so schedules are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Stream `index` of family `stream` derived from a master seed.
  static Rng stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
    s = splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    return Rng(s);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crudesched

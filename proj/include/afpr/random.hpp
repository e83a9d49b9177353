#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace afpr {

/// splitmix64 finalizer; used to derive independent per-trial and per-stage seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(base ^ mix_seed(stream + 0x632BE59BD9B4E019ULL));
}

/// Seeded generator with a fixed, library-independent output sequence.
///
/// The engine is std::mt19937_64, whose sequence is pinned by the standard.
/// Distributions are implemented here rather than taken from <random>, whose
/// algorithms differ between standard library vendors:
///   uniform()   top 53 bits of one draw, scaled to [0, 1)
///   below(n)    rejection sampling on the top bits, unbiased
///   normal()    Box-Muller on two uniform() draws, second variate cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double phase() { return 2.0 * std::numbers::pi * uniform(); }

  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return r % n;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace afpr

#pragma once

#include <cstdint>
#include <random>

namespace klab {

// Seedable 64-bit generator. Replica r of a run seeded with s uses seed s + r.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  // Uniform on [0,1) built from the top 53 bits, identical on every platform
  // (std::uniform_real_distribution is implementation defined).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::uint64_t seed() const { return seed_; }

  Rng replica(std::uint64_t index) const { return Rng(seed_ + index); }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace klab

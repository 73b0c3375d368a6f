#pragma once

#include <cstdint>

namespace topiclens {

/// PCG-XSH-RR 32-bit generator (O'Neill). Portable and bit-reproducible;
/// every stochastic step in the engine draws from one of these.
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) : inc_((stream << 1u) | 1u) {
    next();
    state_ += seed;
    next();
  }

  std::uint32_t next() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint32_t bounded(std::uint32_t bound) {
    const std::uint32_t threshold = (0u - bound) % bound;
    while (true) {
      const std::uint32_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t hi = next();
    const std::uint64_t lo = next();
    const std::uint64_t bits = ((hi << 32u) | lo) >> 11u;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_;
};

}  // namespace topiclens

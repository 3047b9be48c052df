#ifndef MASKMIX_RNG_HPP
#define MASKMIX_RNG_HPP

#include <cstdint>

namespace maskmix {

// SplitMix64 (Steele/Lea/Flood constants). Chosen over std engines because the
// corpus and trained models must be reproducible bit-for-bit across
// implementations, and std::uniform_real_distribution is not pinned by the
// standard. Stream separation is done by offsetting the seed with
// kRngStreamGamma before construction.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo reduction; the tiny bias is irrelevant
  // here, determinism is what matters.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kRngStreamGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace maskmix

#endif  // MASKMIX_RNG_HPP

#pragma once
// SplitMix64: the 64-bit permutation-based generator used for all synthetic
// corpora so that identical seeds reproduce identical byte streams anywhere.
// Reference sequence for seed 0 starts 0xE220A8397B1DCDAF.

#include <cmath>
#include <cstdint>
#include <vector>

namespace exposome {

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) from the top 53 bits.
  constexpr double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n) by modulo reduction; the bias is negligible for the
  // vocabulary sizes used here and keeps the mapping trivially portable.
  constexpr std::uint64_t next_below(std::uint64_t n) {
    return n == 0 ? 0 : next() % n;
  }

 private:
  std::uint64_t state_ = 0;
};

// Rank sampler with Zipf(skew) popularity over ranks 0..n-1; skew 0 is
// uniform. Sampling walks a precomputed CDF, so draws are reproducible.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double skew) : cdf_(n) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += 1.0 / power(static_cast<double>(r + 1), skew);
      cdf_[r] = total;
    }
    for (std::size_t r = 0; r < n; ++r) cdf_[r] /= total;
  }

  std::size_t sample(SplitMix64& rng) const {
    if (cdf_.empty()) return 0;
    const double u = rng.next_double();
    std::size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf_[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  std::size_t size() const { return cdf_.size(); }

 private:
  static double power(double base, double exponent) {
    if (exponent == 0.0) return 1.0;
    return std::pow(base, exponent);
  }

  std::vector<double> cdf_;
};

}  // namespace exposome

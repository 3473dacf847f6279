#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qrate {

// SplitMix64 finalizer; used to derive decorrelated child seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seedable, splittable random stream. child(i) derives an independent stream
// from (seed, i); one child stream per sample index is the reproducibility
// contract used by all Monte Carlo code, so results do not depend on thread
// count or evaluation order. The variate transforms are hand-rolled from raw
// mt19937_64 output (whose sequence is fixed by the standard); std::
// distributions are avoided because their algorithms are implementation
// defined.
class rng_stream {
 public:
  explicit rng_stream(std::uint64_t seed) : seed_(seed), eng_(mix64(seed)) {}

  rng_stream child(std::uint64_t index) const {
    return rng_stream(mix64(seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in {0, ..., n-1}.
  int uniform_int(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n)) % n;
  }

  // Exponential with the given rate, strictly positive.
  double exponential(double rate) {
    double u = uniform();
    while (u == 0.0) u = uniform();
    return -std::log(u) / rate;
  }

  // Standard normal (Box-Muller, cached pair).
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform();  // in (0, 1]
    double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  // Standard complex Gaussian, E|G|^2 = 1.
  std::complex<double> cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re * 0.70710678118654752440, im * 0.70710678118654752440};
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace qrate

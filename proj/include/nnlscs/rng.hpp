#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nnlscs {

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Child seed for substream `index` of `master`. Trial t of an experiment
// always draws from derive_seed(master, t), so results do not depend on
// which thread ran the trial.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (index + 0x9E3779B97F4A7C15ull);
  return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j) {
  return derive_seed(derive_seed(master, i), j);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j,
                                 std::uint64_t k) {
  return derive_seed(derive_seed(master, i, j), k);
}

// Deterministic stream of uniforms and normals. std::normal_distribution is
// implementation-defined, so the Gaussian sampler (Marsaglia polar) is spelled
// out here; identical seeds give identical streams on any platform with the
// same libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  // +1 or -1 with equal probability.
  double rademacher() { return (gen_() & 1ull) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nnlscs

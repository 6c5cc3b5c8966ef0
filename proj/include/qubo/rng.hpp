#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <string_view>

// Random-draw helpers with pinned-down bit streams. std::mt19937_64 has a
// standard-mandated sequence, but the std distributions do not, so every
// draw used for reproducible artifacts goes through these.

namespace qubo::rng {

using engine = std::mt19937_64;

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(engine& gen, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t v = gen();
  while (v >= limit) v = gen();
  return v % n;
}

/// Uniform integer in [lo, hi], inclusive.
inline long long uniform_int(engine& gen, long long lo, long long hi) {
  return lo + static_cast<long long>(
                  uniform_index(gen, static_cast<std::uint64_t>(hi - lo) + 1));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(engine& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(engine& gen, double p) { return uniform_unit(gen) < p; }

/// Standard normal via Box-Muller on owned uniforms.
inline double standard_normal(engine& gen) {
  double u = uniform_unit(gen);
  while (u == 0.0) u = uniform_unit(gen);
  const double v = uniform_unit(gen);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
}

/// FNV-1a accumulator for deriving independent per-cell seeds.
class seed_mixer {
 public:
  explicit seed_mixer(std::uint64_t base = 0xcbf29ce484222325ull) : h_(base) {
    mix_bytes(&base, 0);  // keep base itself out of the byte stream
  }

  seed_mixer& mix(std::uint64_t v) {
    mix_bytes(&v, sizeof v);
    return *this;
  }

  seed_mixer& mix(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return mix(bits);
  }

  seed_mixer& mix(std::string_view s) {
    mix_bytes(s.data(), s.size());
    mix(static_cast<std::uint64_t>(s.size()));
    return *this;
  }

  std::uint64_t value() const noexcept {
    // splitmix-style finalizer so nearby inputs land far apart
    std::uint64_t z = h_;
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

 private:
  void mix_bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ull;
    }
  }

  std::uint64_t h_;
};

}  // namespace qubo::rng

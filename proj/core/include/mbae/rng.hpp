#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace mbae {

// Seeded random source. All draws are built from raw engine words so the
// sequence does not depend on the standard library's distribution
// implementations, and the full state round-trips through serialize() --
// there is no hidden distribution cache to lose across a checkpoint.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  // Standard normal via Box-Muller, always consuming exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Engine state as text (the format of mt19937_64 stream output is
  // standard-specified, so this is portable).
  std::string serialize() const;
  void deserialize(const std::string& state);

  // Decorrelated child seed for a named stream (splitmix64 over master ^ id).
  static std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream_id);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mbae

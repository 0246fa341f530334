#pragma once

#include "dkinet/tensor.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dkinet {

/// Deterministic random stream. All draws are mapped from raw mt19937_64
/// output by hand so sequences are identical across platforms and standard
/// library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; draws two uniforms per call.
  double normal();

  /// Uniform integer in [0, n).
  std::int64_t uniform_int(std::int64_t n);

  /// Bernoulli(p).
  bool chance(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(static_cast<std::int64_t>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::mt19937_64 gen_;
};

/// Stable sub-stream seed: one master seed fans out to per-subsystem
/// streams keyed by a tag (and optional index).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index);

enum class InitScheme { Uniform, Normal };

/// Reproducible tensor init. Uniform draws from (-a, a) with a defaulting
/// to 1/sqrt(last dim) when `param` <= 0; Normal draws from N(0, param).
Tensor seeded_init(const std::vector<Index>& shape, std::uint64_t seed,
                   InitScheme scheme = InitScheme::Uniform, double param = 0.0);

}  // namespace dkinet

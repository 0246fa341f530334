#include "dkinet/rng.hpp"

#include <cmath>

namespace dkinet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double Rng::normal() {
  // u1 in (0, 1] so the log is finite.
  double u1 = ((next_u64() >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::int64_t Rng::uniform_int(std::int64_t n) {
  if (n <= 0) throw TensorError("uniform_int needs n > 0");
  return static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(n));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  return splitmix64(master ^ fnv1a(tag));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  return splitmix64(derive_seed(master, tag) + 0x632be59bd9b4e019ULL * (index + 1));
}

Tensor seeded_init(const std::vector<Index>& shape, std::uint64_t seed,
                   InitScheme scheme, double param) {
  Tensor t = Tensor::zeros(shape);
  Rng rng(seed);
  if (scheme == InitScheme::Uniform) {
    double a = param;
    if (a <= 0.0) {
      Index last = shape.empty() ? 1 : shape.back();
      a = 1.0 / std::sqrt(static_cast<double>(last));
    }
    for (Index i = 0; i < t.size(); ++i) t(i) = rng.uniform(-a, a);
  } else {
    double sigma = param > 0.0 ? param : 1.0;
    for (Index i = 0; i < t.size(); ++i) t(i) = sigma * rng.normal();
  }
  return t;
}

}  // namespace dkinet

#include "ttgs/rng.hpp"

namespace ttgs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x8f1bbcdcbfa53e0bULL;
  for (std::uint64_t p : parts) {
    h = splitmix64(h ^ splitmix64(p));
  }
  return h;
}

std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  if (n == 0) {
    throw Error("bounded: empty range");
  }
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

Scalar uniform_unit(Rng& rng) {
  return static_cast<Scalar>(rng() >> 11) * 0x1.0p-53;
}

Scalar uniform_range(Rng& rng, Scalar lo, Scalar hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

}  // namespace ttgs

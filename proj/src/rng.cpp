#include "mlr/rng.hpp"

#include <cmath>

namespace mlr::rng {

namespace {
constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline uint64_t value_at(uint64_t seed, uint64_t i) {
  return mix(seed + (i + 1) * kGolden);
}
}  // namespace

uint64_t mix(uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t derive(uint64_t seed, uint64_t tag) {
  return mix(mix(seed) + tag * kGolden);
}

double uniform01(uint64_t seed, uint64_t i) {
  // top 53 bits -> [0, 1)
  return static_cast<double>(value_at(seed, i) >> 11) * 0x1.0p-53;
}

double normal(uint64_t seed, uint64_t i) {
  const uint64_t pair = i >> 1;
  const double u1 = 1.0 - uniform01(seed, 2 * pair);  // (0, 1], log-safe
  const double u2 = uniform01(seed, 2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  return (i & 1) ? r * std::sin(a) : r * std::cos(a);
}

}  // namespace mlr::rng

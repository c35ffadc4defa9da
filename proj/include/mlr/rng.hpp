#pragma once

#include <cstdint>

// Counter-based random streams: every draw is a pure function of
// (seed, counter), so any entry of any stream can be regenerated in O(1)
// and runs are reproducible regardless of evaluation order.
namespace mlr::rng {

/// SplitMix64 finalizer.
uint64_t mix(uint64_t x);

/// Seed of an independent sub-stream identified by (seed, tag).
uint64_t derive(uint64_t seed, uint64_t tag);

/// i-th uniform draw in [0, 1) of the stream `seed`.
double uniform01(uint64_t seed, uint64_t i);

/// i-th standard normal draw of the stream `seed` (Box-Muller pairs).
double normal(uint64_t seed, uint64_t i);

}  // namespace mlr::rng

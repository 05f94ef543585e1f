#ifndef PPQKD_RNG_H
#define PPQKD_RNG_H

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ppqkd {

/// Every probabilistic operation takes one of these explicitly. mt19937_64
/// output is fixed by the standard, so streams are portable; the helpers
/// below avoid std distributions, whose outputs are implementation-defined.
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
uint64_t mix64(uint64_t x);

/// Derives an independent child seed from a master seed and a path of tags.
/// The derivation is a chained splitmix64 over (master, tag_0, tag_1, ...).
uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> path);

/// First path element of every derived stream.
enum StreamTag : uint64_t {
    kStreamLeafPrepare = 1,
    kStreamLeafMeasure = 2,
    kStreamNoise = 3,
    kStreamEve = 4,
    kStreamHubMessage = 5,
    kStreamTag = 6,
    kStreamCell = 7,
};

inline Rng make_rng(uint64_t master, std::initializer_list<uint64_t> path) {
    return Rng(derive_seed(master, path));
}

uint8_t random_bit(Rng &rng);

/// Uniform double in [0, 1) with 53 bits of resolution.
double uniform01(Rng &rng);

/// Uniform integer in [0, n). n must be nonzero.
uint64_t uniform_index(Rng &rng, uint64_t n);

}  // namespace ppqkd

#endif

#include "ppqkd/rng.h"

#include <stdexcept>

namespace ppqkd {

uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> path) {
    uint64_t h = mix64(master);
    for (uint64_t tag : path) {
        h = mix64(h ^ mix64(tag + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

uint8_t random_bit(Rng &rng) {
    return (uint8_t)(rng() >> 63);
}

double uniform01(Rng &rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

uint64_t uniform_index(Rng &rng, uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index: n must be nonzero");
    }
    // Rejection sampling keeps the draw unbiased for any n.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

}  // namespace ppqkd

#ifndef PPQKD_INVARIANTS_H
#define PPQKD_INVARIANTS_H

#include <cstdint>
#include <string>
#include <vector>

namespace ppqkd {

struct InvariantCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick self-check of the core algebraic and protocol invariants, used by
/// the `verify` subcommand. Deterministic for a given seed.
std::vector<InvariantCheck> run_invariant_suite(uint64_t seed);

}  // namespace ppqkd

#endif

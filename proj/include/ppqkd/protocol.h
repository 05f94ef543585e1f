#ifndef PPQKD_PROTOCOL_H
#define PPQKD_PROTOCOL_H

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ppqkd/errors.h"
#include "ppqkd/qubit.h"

namespace ppqkd {

using BitString = std::vector<uint8_t>;

BitString xor_bits(const BitString &a, const BitString &b);

enum class Variant : uint8_t { V1, V2, V3 };

std::string_view variant_name(Variant v);
Variant variant_from_name(std::string_view name);

struct RunConfig {
    size_t N = 1;
    size_t t = 1;
    Variant variant = Variant::V1;
    std::vector<Basis> basis_pool{Basis(0.0)};
    size_t tag_length = 0;
    /// Explicit agreed tag. When empty, the tag is drawn from a dedicated
    /// stream of `seed`, which both parties are assumed to share.
    BitString tag_pattern;
    uint64_t seed = 0;

    size_t qubit_count() const { return t * N; }
    /// Bob's key-message length: tN for V1, N for V2 and V3.
    size_t message_length() const { return variant == Variant::V1 ? t * N : N; }
    /// Throws ConfigError.
    void validate() const;
    void validate_pool(const std::vector<Basis> &pool, const char *field) const;
};

/// Phase I output. qubits[k] = encode_bit(a[k], pool[b[k]]).
struct PreparationRecord {
    BitString a;
    std::vector<uint32_t> b;
    std::vector<PureState> qubits;
};

struct KeyMessage {
    BitString m;

    bool operator==(const KeyMessage &) const = default;
};

PreparationRecord alice_prepare(const RunConfig &config, const std::vector<Basis> &pool, Rng &rng);
inline PreparationRecord alice_prepare(const RunConfig &config, Rng &rng) {
    return alice_prepare(config, config.basis_pool, rng);
}

/// Which qubits Bob hits with XZ, one entry per qubit.
BitString bob_pattern(const KeyMessage &m, Variant variant, size_t t);

/// XZ on qubit k when m_k = 1.
std::vector<PureState> bob_encode_v1(const KeyMessage &m, const std::vector<PureState> &qubits);
/// XZ on the whole block (k-1)t+1 .. kt when m_k = 1.
std::vector<PureState> bob_encode_v2(const KeyMessage &m, const std::vector<PureState> &qubits, size_t t);
/// t consecutive copies of the N-slot layout; within each copy XZ on slot k when m_k = 1.
std::vector<PureState> bob_encode_v3(const KeyMessage &m, const std::vector<PureState> &qubits, size_t t);

BitString alice_measure(const std::vector<PureState> &qubits, const PreparationRecord &prep,
                        const std::vector<Basis> &pool, Rng &rng);

KeyMessage derive_v1(const BitString &c, const BitString &a);

struct BlockDecode {
    BitString M;
    std::vector<BitString> blocks;
    BitString m_prime;
    BitString p;
};

/// Strict-majority repetition decode; exact ties are erasures (p = 1, m' = 0).
BlockDecode derive_v2(const BitString &c, const BitString &a, size_t t, size_t N);

struct Resolution {
    BitString C;
    /// positions[j] is the message index that C[j] came from.
    std::vector<size_t> positions;
    size_t pivot = 0;
};

/// Alice's side: retained bits of m' in order, then m'_pivot ^ m'_s for each
/// erased s ascending. Throws NoPivotError when every p bit is set.
Resolution resolve_erasures(const BitString &m_prime, const BitString &p);
/// Bob's side, from his own m and Alice's p. Bob applies the same erasure
/// convention Alice's decoder uses (an erased slot reads as 0) before the
/// pivot XOR, so both sides emit identical strings.
Resolution bob_resolve(const BitString &m, const BitString &p);

struct CopyMajority {
    BitString M;
    std::vector<BitString> copies;
    KeyMessage m;
    /// Columns whose vote tied (even t); those decode to 0.
    std::vector<size_t> ties;
};

CopyMajority derive_v3(const BitString &c, const BitString &a, size_t t, size_t N);

enum class TagVerdict : uint8_t { Accept, Abort };

/// The agreed check sequence for this config, length tag_length.
BitString agreed_tag(const RunConfig &config);

/// Random payload followed by the agreed tag.
KeyMessage make_key_message(const RunConfig &config, Rng &rng);

/// Accept iff the last tag_length bits of `derived` equal the agreed tag.
TagVerdict verify_tag(const KeyMessage &derived, const RunConfig &config);

/// Everything Alice computes in Phase III.
struct DerivationRecord {
    BitString c;
    BitString M;
    std::vector<BitString> blocks;
    /// Decoded message before erasure resolution (equals m for V1/V3).
    KeyMessage m_prime;
    BitString p;
    BitString C;
    std::vector<size_t> C_positions;
    std::optional<size_t> pivot;
    std::vector<size_t> ties;
    bool no_pivot = false;
};

DerivationRecord derive(const RunConfig &config, const BitString &c, const BitString &a);

/// Bob's final key: m itself for V1/V3, bob_resolve(m, p) for V2.
/// Empty when resolution had no pivot.
BitString bob_final_key(const RunConfig &config, const KeyMessage &m, const DerivationRecord &derivation);

}  // namespace ppqkd

#endif

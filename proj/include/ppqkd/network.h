#ifndef PPQKD_NETWORK_H
#define PPQKD_NETWORK_H

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppqkd/noise.h"
#include "ppqkd/protocol.h"

namespace ppqkd {

/// Channel settings between the hub and one leaf.
struct LinkSettings {
    std::string leaf;
    /// Leaf-specific basis pool; falls back to RunConfig::basis_pool.
    std::optional<std::vector<Basis>> basis_pool;
    NoiseModel forward_noise;
    NoiseModel backward_noise;
    EveStrategy eve;
};

struct Topology {
    std::string hub = "Bob";
    std::vector<LinkSettings> leaves;

    /// Throws ConfigError: at least one leaf, unique ids, hub not a leaf.
    void validate(const RunConfig &config) const;
};

enum class Direction : uint8_t { ToHub = 0, ToLeaf = 1 };

struct WireFrame {
    uint16_t link = 0;
    Direction direction = Direction::ToHub;
    uint64_t sequence = 0;
    PureState payload;

    bool operator==(const WireFrame &) const = default;
};

/// Fixed little-endian layout, 43 bytes:
///   [0..2)   link id, uint16
///   [2]      direction, 0 = to hub, 1 = to leaf
///   [3..11)  sequence number, uint64
///   [11..43) amp0.re, amp0.im, amp1.re, amp1.im as IEEE-754 binary64
constexpr size_t kWireFrameBytes = 43;

std::array<uint8_t, kWireFrameBytes> serialize_frame(const WireFrame &frame);
/// Throws std::invalid_argument on a short buffer or bad direction byte.
WireFrame deserialize_frame(std::span<const uint8_t> bytes);

/// What happened to one qubit over a round trip.
struct QubitRecord {
    uint32_t basis_index = 0;
    uint8_t sent_bit = 0;
    EveObservation forward_eve;
    PauliWord forward_noise = PauliWord::I;
    PauliWord bob_op = PauliWord::I;
    EveObservation backward_eve;
    PauliWord backward_noise = PauliWord::I;
    uint8_t measured_bit = 0;

    bool operator==(const QubitRecord &) const = default;
};

struct LinkOutcome {
    uint16_t link = 0;
    std::string leaf;
    std::vector<QubitRecord> qubits;
    /// Every frame seen on the link, in emission order per direction.
    std::vector<WireFrame> frames;
    DerivationRecord derivation;
    TagVerdict verdict = TagVerdict::Accept;
    /// Bob's side of the final key (m, or bob_resolve for V2).
    BitString bob_key;

    const BitString &leaf_key() const { return derivation.C; }
    bool accepted() const { return verdict == TagVerdict::Accept; }
    bool keys_agree() const { return !derivation.no_pivot && derivation.C == bob_key; }
};

struct StarSessionResult {
    std::string hub;
    KeyMessage message;
    std::vector<LinkOutcome> links;
};

enum class Schedule : uint8_t { RoundRobin, Sequential };

/// One key-message from the hub to every leaf. All randomness derives from
/// config.seed: each (party, link, leg) gets its own stream, so traffic on
/// one link never perturbs another. A tag failure marks only that link.
StarSessionResult run_star_session(const Topology &topology, const RunConfig &config,
                                   Schedule schedule = Schedule::RoundRobin);

/// The two-party protocol: a star with a single leaf on link 0.
StarSessionResult run_two_party_session(const RunConfig &config, const LinkSettings &link);

}  // namespace ppqkd

#endif

#include "ppqkd/network.h"

#include <cstring>
#include <set>
#include <sstream>

namespace ppqkd {

void Topology::validate(const RunConfig &config) const {
    if (leaves.empty()) {
        throw ConfigError("topology.leaves", "needs at least one leaf");
    }
    if (leaves.size() > 0xFFFF) {
        throw ConfigError("topology.leaves", "at most 65535 links fit the 16-bit link id");
    }
    std::set<std::string> ids;
    for (const auto &leaf : leaves) {
        if (leaf.leaf == hub) {
            throw ConfigError("topology.leaves", "hub '" + hub + "' cannot also be a leaf");
        }
        if (!ids.insert(leaf.leaf).second) {
            throw ConfigError("topology.leaves", "duplicate leaf id '" + leaf.leaf + "'");
        }
        if (leaf.basis_pool) {
            config.validate_pool(*leaf.basis_pool, "topology.leaves.basis_pool");
        }
        try {
            leaf.forward_noise.validate();
            leaf.backward_noise.validate();
            leaf.eve.validate();
        } catch (const std::invalid_argument &ex) {
            throw ConfigError("topology.leaves." + leaf.leaf, ex.what());
        }
    }
}

namespace {

void put_le(uint8_t *out, uint64_t v, size_t n) {
    for (size_t k = 0; k < n; k++) {
        out[k] = (uint8_t)(v >> (8 * k));
    }
}

uint64_t get_le(const uint8_t *in, size_t n) {
    uint64_t v = 0;
    for (size_t k = 0; k < n; k++) {
        v |= (uint64_t)in[k] << (8 * k);
    }
    return v;
}

void put_double(uint8_t *out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    put_le(out, bits, 8);
}

double get_double(const uint8_t *in) {
    uint64_t bits = get_le(in, 8);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

}  // namespace

std::array<uint8_t, kWireFrameBytes> serialize_frame(const WireFrame &frame) {
    std::array<uint8_t, kWireFrameBytes> out{};
    put_le(&out[0], frame.link, 2);
    out[2] = (uint8_t)frame.direction;
    put_le(&out[3], frame.sequence, 8);
    put_double(&out[11], frame.payload.amp0.real());
    put_double(&out[19], frame.payload.amp0.imag());
    put_double(&out[27], frame.payload.amp1.real());
    put_double(&out[35], frame.payload.amp1.imag());
    return out;
}

WireFrame deserialize_frame(std::span<const uint8_t> bytes) {
    if (bytes.size() < kWireFrameBytes) {
        std::stringstream ss;
        ss << "wire frame needs " << kWireFrameBytes << " bytes, got " << bytes.size();
        throw std::invalid_argument(ss.str());
    }
    if (bytes[2] > 1) {
        throw std::invalid_argument("wire frame direction byte must be 0 or 1");
    }
    WireFrame f;
    f.link = (uint16_t)get_le(&bytes[0], 2);
    f.direction = (Direction)bytes[2];
    f.sequence = get_le(&bytes[3], 8);
    f.payload.amp0 = {get_double(&bytes[11]), get_double(&bytes[19])};
    f.payload.amp1 = {get_double(&bytes[27]), get_double(&bytes[35])};
    return f;
}

namespace {

// Alice (or Celine, ...) at the end of one link.
class LeafParty {
  public:
    LeafParty(uint16_t link, const RunConfig &config, std::vector<Basis> pool)
        : link_(link),
          config_(config),
          pool_(std::move(pool)),
          measure_rng_(make_rng(config.seed, {kStreamLeafMeasure, link})) {
        Rng prepare_rng = make_rng(config.seed, {kStreamLeafPrepare, link});
        prep_ = alice_prepare(config_, pool_, prepare_rng);
        received_.resize(prep_.qubits.size());
    }

    const PreparationRecord &preparation() const { return prep_; }
    const std::vector<Basis> &pool() const { return pool_; }

    WireFrame emit(uint64_t k) const {
        return {link_, Direction::ToHub, k, prep_.qubits[k]};
    }

    uint8_t receive(const WireFrame &frame) {
        uint64_t k = frame.sequence;
        if (frame.direction != Direction::ToLeaf || frame.link != link_ || k != next_expected_) {
            throw std::logic_error("leaf received an out-of-order frame");
        }
        next_expected_++;
        received_[k] = frame.payload;
        return measure_in_basis(frame.payload, pool_[prep_.b[k]], measure_rng_);
    }

  private:
    uint16_t link_;
    const RunConfig &config_;
    std::vector<Basis> pool_;
    Rng measure_rng_;
    PreparationRecord prep_;
    std::vector<PureState> received_;
    uint64_t next_expected_ = 0;
};

// Bob. Holds the one key-message shared by every link.
class HubParty {
  public:
    HubParty(const RunConfig &config, KeyMessage message)
        : message_(std::move(message)), pattern_(bob_pattern(message_, config.variant, config.t)) {}

    const KeyMessage &message() const { return message_; }

    WireFrame process(const WireFrame &in, PauliWord &applied) const {
        if (in.direction != Direction::ToHub) {
            throw std::logic_error("hub received a frame headed to a leaf");
        }
        applied = pattern_[in.sequence] ? PauliWord::XZ : PauliWord::I;
        return {in.link, Direction::ToLeaf, in.sequence, apply_pauli(in.payload, applied)};
    }

  private:
    KeyMessage message_;
    BitString pattern_;
};

// The quantum channel between hub and one leaf. Eve sits at the sender's
// end of each leg; channel noise acts on whatever she forwards.
class Channel {
  public:
    Channel(uint16_t link, const RunConfig &config, const LinkSettings &settings, const std::vector<Basis> &pool)
        : settings_(settings),
          noise_rng_{make_rng(config.seed, {kStreamNoise, link, 0}), make_rng(config.seed, {kStreamNoise, link, 1})},
          eve_rng_{make_rng(config.seed, {kStreamEve, link, 0}), make_rng(config.seed, {kStreamEve, link, 1})} {
        eve_ = settings.eve;
        eve_.basis_policy = settings.eve.basis_policy.resolved(pool);
    }

    WireFrame transit(WireFrame frame, Leg leg, EveObservation &seen, PauliWord &noise_op) {
        size_t l = (size_t)leg;
        if (eve_.acts_on(leg)) {
            auto [state, obs] = eve_tap(frame.payload, eve_, eve_rng_[l]);
            frame.payload = state;
            seen = obs;
        }
        const NoiseModel &noise = leg == Leg::Forward ? settings_.forward_noise : settings_.backward_noise;
        noise_op = noise.is_silent() ? PauliWord::I : sample_error(noise, noise_rng_[l]);
        frame.payload = apply_pauli(frame.payload, noise_op);
        return frame;
    }

  private:
    const LinkSettings &settings_;
    EveStrategy eve_;
    Rng noise_rng_[2];
    Rng eve_rng_[2];
};

struct LinkRun {
    LeafParty leaf;
    Channel channel;
    LinkOutcome outcome;
};

void round_trip(LinkRun &run, const HubParty &hub, uint64_t k) {
    QubitRecord &rec = run.outcome.qubits[k];
    rec.basis_index = run.leaf.preparation().b[k];
    rec.sent_bit = run.leaf.preparation().a[k];

    WireFrame out = run.leaf.emit(k);
    run.outcome.frames.push_back(out);
    WireFrame at_hub = run.channel.transit(out, Leg::Forward, rec.forward_eve, rec.forward_noise);

    WireFrame back = hub.process(at_hub, rec.bob_op);
    run.outcome.frames.push_back(back);
    WireFrame at_leaf = run.channel.transit(back, Leg::Backward, rec.backward_eve, rec.backward_noise);

    rec.measured_bit = run.leaf.receive(at_leaf);
}

}  // namespace

StarSessionResult run_star_session(const Topology &topology, const RunConfig &config, Schedule schedule) {
    config.validate();
    topology.validate(config);

    Rng hub_rng = make_rng(config.seed, {kStreamHubMessage});
    HubParty hub(config, make_key_message(config, hub_rng));

    std::vector<LinkRun> runs;
    runs.reserve(topology.leaves.size());
    for (size_t i = 0; i < topology.leaves.size(); i++) {
        const LinkSettings &settings = topology.leaves[i];
        std::vector<Basis> pool = settings.basis_pool.value_or(config.basis_pool);
        uint16_t link = (uint16_t)i;
        runs.push_back(LinkRun{LeafParty(link, config, pool), Channel(link, config, settings, pool), {}});
        runs.back().outcome.link = link;
        runs.back().outcome.leaf = settings.leaf;
        runs.back().outcome.qubits.resize(config.qubit_count());
    }

    size_t n = config.qubit_count();
    if (schedule == Schedule::RoundRobin) {
        for (uint64_t k = 0; k < n; k++) {
            for (auto &run : runs) {
                round_trip(run, hub, k);
            }
        }
    } else {
        for (auto &run : runs) {
            for (uint64_t k = 0; k < n; k++) {
                round_trip(run, hub, k);
            }
        }
    }

    StarSessionResult result;
    result.hub = topology.hub;
    result.message = hub.message();
    for (auto &run : runs) {
        LinkOutcome &o = run.outcome;
        BitString c(n);
        for (size_t k = 0; k < n; k++) {
            c[k] = o.qubits[k].measured_bit;
        }
        o.derivation = derive(config, c, run.leaf.preparation().a);
        o.verdict = verify_tag(o.derivation.m_prime, config);
        o.bob_key = bob_final_key(config, result.message, o.derivation);
        result.links.push_back(std::move(o));
    }
    return result;
}

StarSessionResult run_two_party_session(const RunConfig &config, const LinkSettings &link) {
    Topology topology;
    topology.leaves.push_back(link);
    if (topology.leaves[0].leaf.empty()) {
        topology.leaves[0].leaf = "Alice";
    }
    return run_star_session(topology, config);
}

}  // namespace ppqkd

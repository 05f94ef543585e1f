#include "ppqkd/serialization.h"

namespace ppqkd {

std::string bits_to_string(const BitString &bits) {
    std::string s(bits.size(), '0');
    for (size_t k = 0; k < bits.size(); k++) {
        s[k] = bits[k] ? '1' : '0';
    }
    return s;
}

BitString bits_from_string(const std::string &text, const std::string &field) {
    BitString out(text.size());
    for (size_t k = 0; k < text.size(); k++) {
        if (text[k] != '0' && text[k] != '1') {
            throw ConfigError(field, "bit strings may only contain '0' and '1'");
        }
        out[k] = text[k] == '1';
    }
    return out;
}

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 15]);
    }
    return s;
}

std::vector<uint8_t> from_hex(const std::string &text) {
    if (text.size() % 2) {
        throw std::invalid_argument("hex string has odd length");
    }
    auto nibble = [](char c) -> uint8_t {
        if (c >= '0' && c <= '9') {
            return (uint8_t)(c - '0');
        }
        if (c >= 'a' && c <= 'f') {
            return (uint8_t)(c - 'a' + 10);
        }
        throw std::invalid_argument("bad hex digit");
    };
    std::vector<uint8_t> out(text.size() / 2);
    for (size_t k = 0; k < out.size(); k++) {
        out[k] = (uint8_t)(nibble(text[2 * k]) << 4 | nibble(text[2 * k + 1]));
    }
    return out;
}

namespace {

template <typename T>
T read_field(const json &j, const char *key, T fallback, const std::string &prefix) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &ex) {
        throw ConfigError(prefix + key, ex.what());
    }
}

}  // namespace

json to_json(const RunConfig &config) {
    json pool = json::array();
    for (const auto &b : config.basis_pool) {
        pool.push_back(b.theta());
    }
    json j;
    j["N"] = config.N;
    j["t"] = config.t;
    j["variant"] = variant_name(config.variant);
    j["basis_pool"] = pool;
    j["tag_length"] = config.tag_length;
    if (!config.tag_pattern.empty()) {
        j["tag_pattern"] = bits_to_string(config.tag_pattern);
    }
    j["seed"] = config.seed;
    return j;
}

RunConfig run_config_from_json(const json &j) {
    if (!j.is_object()) {
        throw ConfigError("run", "must be an object");
    }
    RunConfig c;
    c.N = read_field<size_t>(j, "N", c.N, "run.");
    c.t = read_field<size_t>(j, "t", c.t, "run.");
    c.variant = variant_from_name(read_field<std::string>(j, "variant", "V1", "run."));
    if (j.contains("basis_pool")) {
        auto thetas = read_field<std::vector<double>>(j, "basis_pool", {}, "run.");
        c.basis_pool.clear();
        for (double theta : thetas) {
            c.basis_pool.emplace_back(theta);
        }
    }
    c.tag_length = read_field<size_t>(j, "tag_length", c.tag_length, "run.");
    if (j.contains("tag_pattern")) {
        c.tag_pattern = bits_from_string(read_field<std::string>(j, "tag_pattern", "", "run."), "run.tag_pattern");
    }
    c.seed = read_field<uint64_t>(j, "seed", c.seed, "run.");
    return c;
}

json to_json(const NoiseModel &noise) {
    json j;
    j["p_bitflip"] = noise.p_bitflip;
    j["p_phaseflip"] = noise.p_phaseflip;
    j["p_both"] = noise.p_both;
    return j;
}

NoiseModel noise_from_json(const json &j, const std::string &field) {
    NoiseModel n;
    std::string prefix = field + ".";
    n.p_bitflip = read_field<double>(j, "p_bitflip", 0.0, prefix);
    n.p_phaseflip = read_field<double>(j, "p_phaseflip", 0.0, prefix);
    n.p_both = read_field<double>(j, "p_both", 0.0, prefix);
    try {
        n.validate();
    } catch (const std::invalid_argument &ex) {
        throw ConfigError(field, ex.what());
    }
    return n;
}

json to_json(const EveStrategy &eve) {
    json j;
    j["kind"] = eve_kind_name(eve.kind);
    const BasisPolicy &p = eve.basis_policy;
    if (p.fixed_theta) {
        j["basis_policy"] = {{"fixed", *p.fixed_theta}};
    } else if (!p.use_party_pool) {
        j["basis_policy"] = {{"pool", p.pool}};
    } else {
        j["basis_policy"] = "parties";
    }
    j["legs"] = leg_set_name(eve.legs);
    return j;
}

EveStrategy eve_from_json(const json &j, const std::string &field) {
    EveStrategy e;
    std::string prefix = field + ".";
    try {
        e.kind = eve_kind_from_name(read_field<std::string>(j, "kind", "Absent", prefix));
        e.legs = leg_set_from_name(read_field<std::string>(j, "legs", "both", prefix));
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &ex) {
        throw ConfigError(field, ex.what());
    }
    if (j.contains("basis_policy")) {
        const json &p = j.at("basis_policy");
        if (p.is_string() && p.get<std::string>() == "parties") {
            e.basis_policy = BasisPolicy::party_pool();
        } else if (p.is_object() && p.contains("fixed")) {
            e.basis_policy = BasisPolicy::fixed(read_field<double>(p, "fixed", 0.0, prefix + "basis_policy."));
        } else if (p.is_object() && p.contains("pool")) {
            e.basis_policy = BasisPolicy::uniform(read_field<std::vector<double>>(p, "pool", {}, prefix + "basis_policy."));
        } else {
            throw ConfigError(prefix + "basis_policy", "expected \"parties\", {\"fixed\": theta} or {\"pool\": [...]}");
        }
    }
    try {
        e.validate();
    } catch (const std::invalid_argument &ex) {
        throw ConfigError(field, ex.what());
    }
    return e;
}

json to_json(const EveObservation &obs) {
    if (obs.kind == EveKind::Absent) {
        return nullptr;
    }
    json j;
    j["kind"] = eve_kind_name(obs.kind);
    j["basis"] = obs.basis_theta ? json(*obs.basis_theta) : json(nullptr);
    j["bit"] = obs.bit ? json(*obs.bit) : json(nullptr);
    return j;
}

json transcript_to_json(const LinkOutcome &link) {
    json qubits = json::array();
    for (size_t k = 0; k < link.qubits.size(); k++) {
        const QubitRecord &q = link.qubits[k];
        json r;
        r["k"] = k;
        r["basis"] = q.basis_index;
        r["sent"] = q.sent_bit;
        r["fwd_eve"] = to_json(q.forward_eve);
        r["fwd_noise"] = pauli_name(q.forward_noise);
        r["bob"] = pauli_name(q.bob_op);
        r["bwd_eve"] = to_json(q.backward_eve);
        r["bwd_noise"] = pauli_name(q.backward_noise);
        r["measured"] = q.measured_bit;
        qubits.push_back(std::move(r));
    }
    json frames = json::array();
    for (const auto &f : link.frames) {
        auto bytes = serialize_frame(f);
        frames.push_back(to_hex(bytes));
    }
    const DerivationRecord &d = link.derivation;
    json blocks = json::array();
    for (const auto &b : d.blocks) {
        blocks.push_back(bits_to_string(b));
    }
    json derived;
    derived["c"] = bits_to_string(d.c);
    derived["M"] = bits_to_string(d.M);
    derived["blocks"] = blocks;
    derived["m_prime"] = bits_to_string(d.m_prime.m);
    derived["p"] = bits_to_string(d.p);
    derived["C"] = bits_to_string(d.C);
    derived["C_positions"] = d.C_positions;
    derived["pivot"] = d.pivot ? json(*d.pivot) : json(nullptr);
    derived["ties"] = d.ties;
    derived["no_pivot"] = d.no_pivot;

    json j;
    j["link"] = link.link;
    j["leaf"] = link.leaf;
    j["qubits"] = qubits;
    j["frames"] = frames;
    j["derived"] = derived;
    j["verdict"] = link.accepted() ? "accept" : "abort";
    j["bob_key"] = bits_to_string(link.bob_key);
    j["keys_agree"] = link.keys_agree();
    return j;
}

json transcript_to_json(const StarSessionResult &session, const RunConfig &config) {
    json links = json::array();
    for (const auto &l : session.links) {
        links.push_back(transcript_to_json(l));
    }
    json j;
    j["format"] = "ppqkd-transcript/1";
    j["config"] = to_json(config);
    j["hub"] = session.hub;
    j["message"] = bits_to_string(session.message.m);
    j["links"] = links;
    return j;
}

}  // namespace ppqkd

#include "ppqkd/protocol.h"

#include <cmath>
#include <set>
#include <sstream>

namespace ppqkd {

namespace {

void require_length(size_t actual, size_t expected, const char *what) {
    if (actual != expected) {
        std::stringstream ss;
        ss << what << ": length mismatch (got " << actual << ", expected " << expected << ")";
        throw std::invalid_argument(ss.str());
    }
}

std::vector<PureState> apply_pattern(const BitString &pattern, const std::vector<PureState> &qubits) {
    std::vector<PureState> out;
    out.reserve(qubits.size());
    for (size_t k = 0; k < qubits.size(); k++) {
        out.push_back(pattern[k] ? apply_pauli(qubits[k], PauliWord::XZ) : qubits[k]);
    }
    return out;
}

// 2 * ones > t decodes 1, 2 * ones < t decodes 0, equality is a tie.
int vote(size_t ones, size_t t) {
    if (2 * ones > t) {
        return 1;
    }
    if (2 * ones < t) {
        return 0;
    }
    return -1;
}

}  // namespace

BitString xor_bits(const BitString &a, const BitString &b) {
    require_length(b.size(), a.size(), "xor_bits");
    BitString out(a.size());
    for (size_t k = 0; k < a.size(); k++) {
        out[k] = a[k] ^ b[k];
    }
    return out;
}

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::V1:
            return "V1";
        case Variant::V2:
            return "V2";
        case Variant::V3:
            return "V3";
    }
    throw std::invalid_argument("unknown Variant");
}

Variant variant_from_name(std::string_view name) {
    for (Variant v : {Variant::V1, Variant::V2, Variant::V3}) {
        if (variant_name(v) == name) {
            return v;
        }
    }
    throw ConfigError("variant", "expected V1, V2 or V3, got '" + std::string(name) + "'");
}

void RunConfig::validate_pool(const std::vector<Basis> &pool, const char *field) const {
    if (pool.empty()) {
        throw ConfigError(field, "basis pool must not be empty");
    }
    std::set<double> seen;
    for (const auto &b : pool) {
        if (!std::isfinite(b.theta())) {
            throw ConfigError(field, "basis angles must be finite");
        }
        if (!seen.insert(b.theta()).second) {
            std::stringstream ss;
            ss << "basis angles must be pairwise distinct; " << b.theta() << " repeats";
            throw ConfigError(field, ss.str());
        }
    }
}

void RunConfig::validate() const {
    if (N < 1) {
        throw ConfigError("N", "must be at least 1");
    }
    if (t < 1) {
        throw ConfigError("t", "must be at least 1");
    }
    validate_pool(basis_pool, "basis_pool");
    if (tag_length > message_length()) {
        std::stringstream ss;
        ss << "tag_length " << tag_length << " exceeds message length " << message_length();
        throw ConfigError("tag_length", ss.str());
    }
    if (!tag_pattern.empty()) {
        if (tag_pattern.size() != tag_length) {
            throw ConfigError("tag_pattern", "length must equal tag_length");
        }
        for (uint8_t bit : tag_pattern) {
            if (bit > 1) {
                throw ConfigError("tag_pattern", "entries must be 0 or 1");
            }
        }
    }
}

PreparationRecord alice_prepare(const RunConfig &config, const std::vector<Basis> &pool, Rng &rng) {
    size_t n = config.qubit_count();
    PreparationRecord rec;
    rec.a.resize(n);
    rec.b.resize(n);
    rec.qubits.reserve(n);
    for (size_t k = 0; k < n; k++) {
        rec.a[k] = random_bit(rng);
    }
    for (size_t k = 0; k < n; k++) {
        rec.b[k] = (uint32_t)uniform_index(rng, pool.size());
    }
    for (size_t k = 0; k < n; k++) {
        rec.qubits.push_back(encode_bit(rec.a[k], pool[rec.b[k]]));
    }
    return rec;
}

BitString bob_pattern(const KeyMessage &m, Variant variant, size_t t) {
    size_t len = m.m.size();
    switch (variant) {
        case Variant::V1:
            return m.m;
        case Variant::V2: {
            BitString out(len * t);
            for (size_t k = 0; k < len; k++) {
                for (size_t j = 0; j < t; j++) {
                    out[k * t + j] = m.m[k];
                }
            }
            return out;
        }
        case Variant::V3: {
            BitString out(len * t);
            for (size_t copy = 0; copy < t; copy++) {
                for (size_t k = 0; k < len; k++) {
                    out[copy * len + k] = m.m[k];
                }
            }
            return out;
        }
    }
    throw std::invalid_argument("unknown Variant");
}

std::vector<PureState> bob_encode_v1(const KeyMessage &m, const std::vector<PureState> &qubits) {
    require_length(qubits.size(), m.m.size(), "bob_encode_v1");
    return apply_pattern(bob_pattern(m, Variant::V1, 1), qubits);
}

std::vector<PureState> bob_encode_v2(const KeyMessage &m, const std::vector<PureState> &qubits, size_t t) {
    require_length(qubits.size(), t * m.m.size(), "bob_encode_v2");
    return apply_pattern(bob_pattern(m, Variant::V2, t), qubits);
}

std::vector<PureState> bob_encode_v3(const KeyMessage &m, const std::vector<PureState> &qubits, size_t t) {
    require_length(qubits.size(), t * m.m.size(), "bob_encode_v3");
    return apply_pattern(bob_pattern(m, Variant::V3, t), qubits);
}

BitString alice_measure(const std::vector<PureState> &qubits, const PreparationRecord &prep,
                        const std::vector<Basis> &pool, Rng &rng) {
    require_length(qubits.size(), prep.b.size(), "alice_measure");
    BitString c(qubits.size());
    for (size_t k = 0; k < qubits.size(); k++) {
        c[k] = measure_in_basis(qubits[k], pool[prep.b[k]], rng);
    }
    return c;
}

KeyMessage derive_v1(const BitString &c, const BitString &a) {
    require_length(c.size(), a.size(), "derive_v1");
    return {xor_bits(c, a)};
}

BlockDecode derive_v2(const BitString &c, const BitString &a, size_t t, size_t N) {
    require_length(c.size(), a.size(), "derive_v2");
    require_length(c.size(), t * N, "derive_v2");
    BlockDecode out;
    out.M = xor_bits(c, a);
    out.m_prime.assign(N, 0);
    out.p.assign(N, 0);
    out.blocks.reserve(N);
    for (size_t s = 0; s < N; s++) {
        BitString block(out.M.begin() + s * t, out.M.begin() + (s + 1) * t);
        size_t ones = 0;
        for (uint8_t bit : block) {
            ones += bit;
        }
        int v = vote(ones, t);
        if (v < 0) {
            out.p[s] = 1;
        } else {
            out.m_prime[s] = (uint8_t)v;
        }
        out.blocks.push_back(std::move(block));
    }
    return out;
}

namespace {

Resolution resolve_common(const BitString &bits, const BitString &p, const char *who) {
    require_length(p.size(), bits.size(), who);
    Resolution r;
    bool found = false;
    for (size_t k = 0; k < p.size(); k++) {
        if (p[k] == 0) {
            r.pivot = k;
            found = true;
            break;
        }
    }
    if (!found) {
        throw NoPivotError(std::string(who) + ": every block is erased; no pivot with p = 0 exists");
    }
    for (size_t s = 0; s < p.size(); s++) {
        if (p[s] == 0) {
            r.C.push_back(bits[s]);
            r.positions.push_back(s);
        }
    }
    for (size_t s = 0; s < p.size(); s++) {
        if (p[s] == 1) {
            r.C.push_back(bits[r.pivot] ^ bits[s]);
            r.positions.push_back(s);
        }
    }
    return r;
}

}  // namespace

Resolution resolve_erasures(const BitString &m_prime, const BitString &p) {
    return resolve_common(m_prime, p, "resolve_erasures");
}

Resolution bob_resolve(const BitString &m, const BitString &p) {
    require_length(p.size(), m.size(), "bob_resolve");
    BitString masked = m;
    for (size_t s = 0; s < p.size(); s++) {
        if (p[s]) {
            masked[s] = 0;
        }
    }
    return resolve_common(masked, p, "bob_resolve");
}

CopyMajority derive_v3(const BitString &c, const BitString &a, size_t t, size_t N) {
    require_length(c.size(), a.size(), "derive_v3");
    require_length(c.size(), t * N, "derive_v3");
    CopyMajority out;
    out.M = xor_bits(c, a);
    for (size_t copy = 0; copy < t; copy++) {
        out.copies.emplace_back(out.M.begin() + copy * N, out.M.begin() + (copy + 1) * N);
    }
    out.m.m.assign(N, 0);
    for (size_t k = 0; k < N; k++) {
        size_t ones = 0;
        for (size_t copy = 0; copy < t; copy++) {
            ones += out.M[copy * N + k];
        }
        int v = vote(ones, t);
        if (v < 0) {
            out.ties.push_back(k);
        } else {
            out.m.m[k] = (uint8_t)v;
        }
    }
    return out;
}

BitString agreed_tag(const RunConfig &config) {
    if (!config.tag_pattern.empty()) {
        return config.tag_pattern;
    }
    Rng rng = make_rng(config.seed, {kStreamTag});
    BitString tag(config.tag_length);
    for (auto &bit : tag) {
        bit = random_bit(rng);
    }
    return tag;
}

KeyMessage make_key_message(const RunConfig &config, Rng &rng) {
    size_t len = config.message_length();
    BitString tag = agreed_tag(config);
    KeyMessage m;
    m.m.reserve(len);
    for (size_t k = 0; k + tag.size() < len; k++) {
        m.m.push_back(random_bit(rng));
    }
    m.m.insert(m.m.end(), tag.begin(), tag.end());
    return m;
}

TagVerdict verify_tag(const KeyMessage &derived, const RunConfig &config) {
    if (config.tag_length == 0) {
        return TagVerdict::Accept;
    }
    if (derived.m.size() < config.tag_length) {
        return TagVerdict::Abort;
    }
    BitString tag = agreed_tag(config);
    size_t offset = derived.m.size() - tag.size();
    for (size_t k = 0; k < tag.size(); k++) {
        if (derived.m[offset + k] != tag[k]) {
            return TagVerdict::Abort;
        }
    }
    return TagVerdict::Accept;
}

DerivationRecord derive(const RunConfig &config, const BitString &c, const BitString &a) {
    DerivationRecord rec;
    rec.c = c;
    switch (config.variant) {
        case Variant::V1: {
            rec.m_prime = derive_v1(c, a);
            rec.M = rec.m_prime.m;
            rec.C = rec.m_prime.m;
            break;
        }
        case Variant::V2: {
            BlockDecode d = derive_v2(c, a, config.t, config.N);
            rec.M = std::move(d.M);
            rec.blocks = std::move(d.blocks);
            rec.m_prime.m = std::move(d.m_prime);
            rec.p = std::move(d.p);
            try {
                Resolution r = resolve_erasures(rec.m_prime.m, rec.p);
                rec.C = std::move(r.C);
                rec.C_positions = std::move(r.positions);
                rec.pivot = r.pivot;
            } catch (const NoPivotError &) {
                rec.no_pivot = true;
            }
            break;
        }
        case Variant::V3: {
            CopyMajority d = derive_v3(c, a, config.t, config.N);
            rec.M = std::move(d.M);
            rec.blocks = std::move(d.copies);
            rec.m_prime = std::move(d.m);
            rec.ties = std::move(d.ties);
            rec.C = rec.m_prime.m;
            break;
        }
    }
    return rec;
}

BitString bob_final_key(const RunConfig &config, const KeyMessage &m, const DerivationRecord &derivation) {
    if (config.variant != Variant::V2) {
        return m.m;
    }
    if (derivation.no_pivot) {
        return {};
    }
    return bob_resolve(m.m, derivation.p).C;
}

}  // namespace ppqkd

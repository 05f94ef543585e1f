#include "ppqkd/invariants.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ppqkd/network.h"
#include "ppqkd/serialization.h"

namespace ppqkd {

namespace {

using Check = InvariantCheck;

Check orthonormality() {
    double worst = 0;
    for (int g = 0; g <= 1000; g++) {
        Basis b(-std::numbers::pi + 2 * std::numbers::pi * g / 1000);
        PureState s0 = encode_bit(0, b), s1 = encode_bit(1, b);
        worst = std::max({worst, overlap(s0, s1), std::abs(s0.norm_squared() - 1), std::abs(s1.norm_squared() - 1)});
    }
    return {"basis orthonormality", worst < 1e-12, "worst deviation " + std::to_string(worst)};
}

Check xz_flip() {
    double worst = 0;
    for (int g = 0; g <= 1000; g++) {
        Basis b(2 * std::numbers::pi * g / 1000);
        for (uint8_t i : {0, 1}) {
            PureState s = encode_bit(i, b);
            worst = std::max(worst, std::abs(1 - outcome_probability(apply_pauli(s, PauliWord::XZ), b, 1 - i)));
            worst = std::max(worst, std::abs(1 - outcome_probability(apply_pauli(s, PauliWord::ZX), b, 1 - i)));
            if (!equal_up_to_phase(apply_pauli(s, PauliWord::XZ), apply_pauli(s, PauliWord::ZX))) {
                worst = 1;
            }
        }
    }
    return {"deterministic XZ/ZX flip", worst < 1e-12, ""};
}

Check flip_law() {
    double worst = 0;
    for (int g = 0; g <= 1000; g++) {
        double th = 2 * std::numbers::pi * g / 1000;
        Basis b(th);
        double c = std::cos(th), s = std::sin(th);
        double x = (c * c - s * s) * (c * c - s * s);
        double z = (2 * s * c) * (2 * s * c);
        worst = std::max(worst, std::abs(flip_probability(b, PauliWord::X) - x));
        worst = std::max(worst, std::abs(flip_probability(b, PauliWord::Z) - z));
        for (PauliWord op : {PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::XZ, PauliWord::ZX}) {
            worst = std::max(worst, std::abs(flip_probability(b, op, 0) - flip_probability(b, op, 1)));
        }
    }
    return {"analytic flip law", worst < 1e-12, ""};
}

Check channel_laws(Rng &rng) {
    double worst = 0;
    for (int trial = 0; trial < 200; trial++) {
        NoiseModel n{uniform01(rng) / 3, uniform01(rng) / 3, uniform01(rng) / 3};
        KrausChannel ch = n.channel();
        double th = uniform01(rng) * 2 * std::numbers::pi;
        DensityMatrix rho = apply_channel(to_density(encode_bit(random_bit(rng), Basis(th))), ch);
        worst = std::max(worst, std::abs(rho.trace() - cplx(1.0)));
        worst = std::max(worst, rho.hermiticity_error());
        worst = std::max(worst, std::max(0.0, -rho.eigenvalues()[0]));
    }
    return {"Kraus channel laws", worst < 1e-10, ""};
}

Check repetition_decode() {
    for (size_t t = 1; t <= 5; t++) {
        for (uint64_t pattern = 0; pattern < (1ULL << t); pattern++) {
            size_t flips = (size_t)std::popcount(pattern);
            for (uint8_t bit : {0, 1}) {
                BitString a(t, 0), c(t);
                for (size_t j = 0; j < t; j++) {
                    c[j] = bit ^ ((pattern >> j) & 1);
                }
                BlockDecode d = derive_v2(c, a, t, 1);
                bool tie = 2 * flips == t;
                if (tie != (d.p[0] == 1)) {
                    return {"V2 repetition decode", false, "tie flag wrong at t=" + std::to_string(t)};
                }
                if (2 * flips < t && d.m_prime[0] != bit) {
                    return {"V2 repetition decode", false, "decode wrong at t=" + std::to_string(t)};
                }
            }
        }
    }
    return {"V2 repetition decode", true, ""};
}

Check erasure_consistency() {
    for (size_t n = 1; n <= 4; n++) {
        for (uint64_t mbits = 0; mbits < (1ULL << n); mbits++) {
            for (uint64_t pbits = 0; pbits < (1ULL << n); pbits++) {
                BitString m(n), p(n), mp(n);
                for (size_t k = 0; k < n; k++) {
                    m[k] = (mbits >> k) & 1;
                    p[k] = (pbits >> k) & 1;
                    mp[k] = p[k] ? 0 : m[k];
                }
                if (pbits == (1ULL << n) - 1) {
                    bool threw = false;
                    try {
                        resolve_erasures(mp, p);
                    } catch (const NoPivotError &) {
                        threw = true;
                    }
                    if (!threw) {
                        return {"V2 erasure consistency", false, "all-erasure input did not abort"};
                    }
                    continue;
                }
                if (resolve_erasures(mp, p).C != bob_resolve(m, p).C) {
                    return {"V2 erasure consistency", false, "Alice and Bob disagree"};
                }
            }
        }
    }
    return {"V2 erasure consistency", true, ""};
}

Check copy_majority() {
    for (size_t t = 1; t <= 3; t++) {
        for (size_t n = 1; n <= 4; n++) {
            size_t len = t * n;
            for (uint64_t bits = 0; bits < (1ULL << len); bits++) {
                BitString c(len), a(len, 0);
                for (size_t k = 0; k < len; k++) {
                    c[k] = (bits >> k) & 1;
                }
                CopyMajority d = derive_v3(c, a, t, n);
                for (size_t k = 0; k < n; k++) {
                    size_t ones = 0;
                    for (size_t j = 0; j < t; j++) {
                        ones += c[j * n + k];
                    }
                    uint8_t expect = 2 * ones > t ? 1 : 0;
                    if (d.m.m[k] != expect) {
                        return {"V3 copy majority", false, ""};
                    }
                }
            }
        }
    }
    return {"V3 copy majority", true, ""};
}

Check v1_exactness(Rng &rng) {
    for (int run = 0; run < 200; run++) {
        RunConfig cfg;
        cfg.N = 1 + uniform_index(rng, 64);
        cfg.basis_pool.clear();
        size_t pool = 1 + uniform_index(rng, 8);
        for (size_t k = 0; k < pool; k++) {
            cfg.basis_pool.emplace_back(0.1 * (double)k + uniform01(rng) * 0.05);
        }
        cfg.seed = rng();
        StarSessionResult r = run_two_party_session(cfg, {});
        if (r.links[0].derivation.m_prime != r.message) {
            return {"V1 noiseless exactness", false, "run " + std::to_string(run)};
        }
    }
    return {"V1 noiseless exactness", true, ""};
}

Check phase_invariance(Rng &rng) {
    double worst = 0;
    for (int trial = 0; trial < 500; trial++) {
        double th = uniform01(rng) * 2 * std::numbers::pi;
        double ph = uniform01(rng) * 2 * std::numbers::pi;
        PureState s = encode_bit(random_bit(rng), Basis(uniform01(rng) * 3));
        PureState r = s.scaled(std::polar(1.0, ph));
        worst = std::max(worst, std::abs(outcome_probability(s, Basis(th), 1) - outcome_probability(r, Basis(th), 1)));
    }
    return {"global phase invariance", worst < 1e-12, ""};
}

Check frame_layout(Rng &rng) {
    for (int trial = 0; trial < 100; trial++) {
        WireFrame f{(uint16_t)rng(), random_bit(rng) ? Direction::ToLeaf : Direction::ToHub, rng(),
                    encode_bit(random_bit(rng), Basis(uniform01(rng)))};
        auto bytes = serialize_frame(f);
        if (!(deserialize_frame(bytes) == f)) {
            return {"wire frame layout", false, ""};
        }
    }
    return {"wire frame layout", true, ""};
}

Check link_independence(uint64_t seed) {
    RunConfig cfg;
    cfg.N = 16;
    cfg.tag_length = 8;
    cfg.basis_pool = {Basis(0), Basis(std::numbers::pi / 4)};
    cfg.seed = seed;
    Topology clean;
    for (int i = 0; i < 4; i++) {
        clean.leaves.push_back({"L" + std::to_string(i), {}, {}, {}, {}});
    }
    Topology dirty = clean;
    dirty.leaves[2].eve.kind = EveKind::Substitute;
    dirty.leaves[2].forward_noise.p_bitflip = 0.3;
    auto a = run_star_session(clean, cfg);
    auto b = run_star_session(dirty, cfg);
    for (size_t i = 0; i < 4; i++) {
        if (i != 2 && transcript_to_json(a.links[i]) != transcript_to_json(b.links[i])) {
            return {"star link independence", false, "link " + std::to_string(i)};
        }
    }
    return {"star link independence", true, ""};
}

}  // namespace

std::vector<InvariantCheck> run_invariant_suite(uint64_t seed) {
    Rng rng = make_rng(seed, {0x7665726966ULL});
    std::vector<InvariantCheck> out;
    out.push_back(orthonormality());
    out.push_back(xz_flip());
    out.push_back(flip_law());
    out.push_back(channel_laws(rng));
    out.push_back(phase_invariance(rng));
    out.push_back(repetition_decode());
    out.push_back(erasure_consistency());
    out.push_back(copy_majority());
    out.push_back(v1_exactness(rng));
    out.push_back(frame_layout(rng));
    out.push_back(link_independence(seed));
    return out;
}

}  // namespace ppqkd

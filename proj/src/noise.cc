#include "ppqkd/noise.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppqkd {

namespace {

void check_probability(double p, const char *field) {
    if (!(p >= 0 && p <= 1)) {
        std::stringstream ss;
        ss << field << " must lie in [0, 1], got " << p;
        throw std::invalid_argument(ss.str());
    }
}

}  // namespace

void NoiseModel::validate() const {
    check_probability(p_bitflip, "p_bitflip");
    check_probability(p_phaseflip, "p_phaseflip");
    check_probability(p_both, "p_both");
    double total = p_bitflip + p_phaseflip + p_both;
    if (total > 1 + 1e-12) {
        std::stringstream ss;
        ss << "p_bitflip + p_phaseflip + p_both must not exceed 1, got " << total;
        throw std::invalid_argument(ss.str());
    }
}

KrausChannel NoiseModel::channel() const {
    validate();
    double rest = std::max(0.0, 1 - p_bitflip - p_phaseflip - p_both);
    std::vector<PauliExpansion> ops(4);
    ops[0].coeffs[0] = std::sqrt(rest);
    ops[1].coeffs[1] = std::sqrt(p_bitflip);
    ops[2].coeffs[2] = std::sqrt(p_phaseflip);
    ops[3].coeffs[3] = std::sqrt(p_both);
    return KrausChannel(std::move(ops));
}

PauliWord sample_error(const NoiseModel &noise, Rng &rng) {
    double u = uniform01(rng);
    if (u < noise.p_bitflip) {
        return PauliWord::X;
    }
    u -= noise.p_bitflip;
    if (u < noise.p_phaseflip) {
        return PauliWord::Z;
    }
    u -= noise.p_phaseflip;
    if (u < noise.p_both) {
        return PauliWord::XZ;
    }
    return PauliWord::I;
}

PureState perturb(const PureState &state, const NoiseModel &noise, Rng &rng) {
    noise.validate();
    return apply_pauli(state, sample_error(noise, rng));
}

bool leg_in(LegSet set, Leg leg) {
    switch (set) {
        case LegSet::None:
            return false;
        case LegSet::Forward:
            return leg == Leg::Forward;
        case LegSet::Backward:
            return leg == Leg::Backward;
        case LegSet::Both:
            return true;
    }
    return false;
}

std::string_view leg_set_name(LegSet set) {
    switch (set) {
        case LegSet::None:
            return "none";
        case LegSet::Forward:
            return "forward";
        case LegSet::Backward:
            return "backward";
        case LegSet::Both:
            return "both";
    }
    throw std::invalid_argument("unknown LegSet");
}

LegSet leg_set_from_name(std::string_view name) {
    for (LegSet s : {LegSet::None, LegSet::Forward, LegSet::Backward, LegSet::Both}) {
        if (leg_set_name(s) == name) {
            return s;
        }
    }
    std::stringstream ss;
    ss << "unknown leg set '" << name << "'; expected none, forward, backward or both";
    throw std::invalid_argument(ss.str());
}

std::string_view eve_kind_name(EveKind kind) {
    switch (kind) {
        case EveKind::Absent:
            return "Absent";
        case EveKind::InterceptResend:
            return "InterceptResend";
        case EveKind::Substitute:
            return "Substitute";
    }
    throw std::invalid_argument("unknown EveKind");
}

EveKind eve_kind_from_name(std::string_view name) {
    for (EveKind k : {EveKind::Absent, EveKind::InterceptResend, EveKind::Substitute}) {
        if (eve_kind_name(k) == name) {
            return k;
        }
    }
    std::stringstream ss;
    ss << "unknown Eve strategy '" << name << "'; expected Absent, InterceptResend or Substitute";
    throw std::invalid_argument(ss.str());
}

BasisPolicy BasisPolicy::fixed(double theta) {
    BasisPolicy p;
    p.fixed_theta = theta;
    p.use_party_pool = false;
    return p;
}

BasisPolicy BasisPolicy::uniform(std::vector<double> thetas) {
    BasisPolicy p;
    p.pool = std::move(thetas);
    p.use_party_pool = false;
    return p;
}

BasisPolicy BasisPolicy::resolved(const std::vector<Basis> &party_pool) const {
    if (!use_party_pool || fixed_theta.has_value()) {
        return *this;
    }
    std::vector<double> thetas;
    thetas.reserve(party_pool.size());
    for (const auto &b : party_pool) {
        thetas.push_back(b.theta());
    }
    return uniform(std::move(thetas));
}

Basis BasisPolicy::draw(Rng &rng) const {
    if (fixed_theta.has_value()) {
        return Basis(*fixed_theta);
    }
    if (pool.empty()) {
        throw std::invalid_argument("basis_policy: pool is empty or unresolved");
    }
    if (pool.size() == 1) {
        return Basis(pool[0]);
    }
    return Basis(pool[uniform_index(rng, pool.size())]);
}

void EveStrategy::validate() const {
    if (kind == EveKind::Absent) {
        return;
    }
    if (!basis_policy.fixed_theta.has_value() && !basis_policy.use_party_pool && basis_policy.pool.empty()) {
        throw std::invalid_argument("eve.basis_policy: uniform policy needs a non-empty pool");
    }
}

std::pair<PureState, EveObservation> eve_tap(const PureState &state, const EveStrategy &strategy, Rng &rng) {
    EveObservation obs;
    obs.kind = strategy.kind;
    switch (strategy.kind) {
        case EveKind::Absent:
            return {state, obs};
        case EveKind::InterceptResend: {
            Basis basis = strategy.basis_policy.draw(rng);
            uint8_t outcome = measure_in_basis(state, basis, rng);
            obs.basis_theta = basis.theta();
            obs.bit = outcome;
            return {encode_bit(outcome, basis), obs};
        }
        case EveKind::Substitute: {
            Basis basis = strategy.basis_policy.draw(rng);
            uint8_t bit = random_bit(rng);
            obs.basis_theta = basis.theta();
            obs.bit = bit;
            return {encode_bit(bit, basis), obs};
        }
    }
    throw std::invalid_argument("unknown EveKind");
}

}  // namespace ppqkd

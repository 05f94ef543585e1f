#ifndef PPQKD_NOISE_H
#define PPQKD_NOISE_H

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ppqkd/qubit.h"

namespace ppqkd {

/// Pauli noise on one transit leg. Residual probability 1 - sum goes to I.
struct NoiseModel {
    double p_bitflip = 0;
    double p_phaseflip = 0;
    double p_both = 0;

    bool is_silent() const { return p_bitflip == 0 && p_phaseflip == 0 && p_both == 0; }
    /// Throws std::invalid_argument naming the bad field.
    void validate() const;
    /// {sqrt(1-sum) I, sqrt(p_bitflip) X, sqrt(p_phaseflip) Z, sqrt(p_both) XZ}.
    KrausChannel channel() const;

    bool operator==(const NoiseModel &) const = default;
};

/// Samples the Pauli applied on one leg (one of I, X, Z, XZ).
PauliWord sample_error(const NoiseModel &noise, Rng &rng);

/// Stochastic unraveling of NoiseModel::channel() on a pure state.
PureState perturb(const PureState &state, const NoiseModel &noise, Rng &rng);

enum class Leg : uint8_t { Forward = 0, Backward = 1 };
enum class LegSet : uint8_t { None, Forward, Backward, Both };

bool leg_in(LegSet set, Leg leg);
std::string_view leg_set_name(LegSet set);
LegSet leg_set_from_name(std::string_view name);

enum class EveKind : uint8_t { Absent, InterceptResend, Substitute };

std::string_view eve_kind_name(EveKind kind);
EveKind eve_kind_from_name(std::string_view name);

/// How Eve picks the basis she measures in (or prepares in, for Substitute).
/// An empty `pool` with `use_party_pool` set means "whatever pool the
/// attacked parties use", resolved by the session driver.
struct BasisPolicy {
    std::optional<double> fixed_theta;
    std::vector<double> pool;
    bool use_party_pool = true;

    static BasisPolicy fixed(double theta);
    static BasisPolicy uniform(std::vector<double> thetas);
    static BasisPolicy party_pool() { return {}; }

    /// Replaces the party-pool placeholder with a concrete pool.
    BasisPolicy resolved(const std::vector<Basis> &party_pool) const;
    Basis draw(Rng &rng) const;

    bool operator==(const BasisPolicy &) const = default;
};

struct EveStrategy {
    EveKind kind = EveKind::Absent;
    BasisPolicy basis_policy;
    LegSet legs = LegSet::Both;

    bool acts_on(Leg leg) const { return kind != EveKind::Absent && leg_in(legs, leg); }
    void validate() const;

    bool operator==(const EveStrategy &) const = default;
};

/// Only Eve-side data: the basis she used and the bit she measured or sent.
/// There is deliberately no field for anything the legitimate parties hold.
struct EveObservation {
    EveKind kind = EveKind::Absent;
    std::optional<double> basis_theta;
    std::optional<uint8_t> bit;

    bool empty() const { return !basis_theta.has_value() && !bit.has_value(); }
    bool operator==(const EveObservation &) const = default;
};

/// Eve sees only the qubit value. Absent: identity. InterceptResend: measure
/// in a policy basis and re-emit the collapsed eigenstate. Substitute: emit a
/// fresh random eigenstate of a policy basis, independent of the input.
/// The policy must already be resolved.
std::pair<PureState, EveObservation> eve_tap(const PureState &state, const EveStrategy &strategy, Rng &rng);

}  // namespace ppqkd

#endif

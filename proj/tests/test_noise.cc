#include <gtest/gtest.h>

#include <numbers>

#include "ppqkd/noise.h"
#include "support.h"

using namespace ppqkd;

namespace {

constexpr double kPi = std::numbers::pi;

// Sample mean and 3-sigma bound per entry of to_density(perturb(s)).
void expect_unraveling_matches_channel(const PureState &s, const NoiseModel &noise, uint64_t seed) {
    const size_t n = 100000;
    ppqkd::Rng rng(seed);
    std::array<cplx, 4> sum{}, sum_sq{};
    for (size_t k = 0; k < n; k++) {
        DensityMatrix d = to_density(perturb(s, noise, rng));
        for (size_t j = 0; j < 4; j++) {
            sum[j] += d.entries.e[j];
            sum_sq[j] += cplx(d.entries.e[j].real() * d.entries.e[j].real(), d.entries.e[j].imag() * d.entries.e[j].imag());
        }
    }
    DensityMatrix exact = apply_channel(to_density(s), noise.channel());
    for (size_t j = 0; j < 4; j++) {
        cplx mean = sum[j] / (double)n;
        double var_re = sum_sq[j].real() / n - mean.real() * mean.real();
        double var_im = sum_sq[j].imag() / n - mean.imag() * mean.imag();
        double tol_re = 3 * std::sqrt(std::max(var_re, 0.0) / n) + 1e-12;
        double tol_im = 3 * std::sqrt(std::max(var_im, 0.0) / n) + 1e-12;
        EXPECT_NEAR(mean.real(), exact.entries.e[j].real(), tol_re) << "entry " << j;
        EXPECT_NEAR(mean.imag(), exact.entries.e[j].imag(), tol_im) << "entry " << j;
    }
}

}  // namespace

TEST(noise_model, validation) {
    EXPECT_NO_THROW((NoiseModel{0.2, 0.3, 0.5}.validate()));
    EXPECT_THROW((NoiseModel{-0.1, 0, 0}.validate()), std::invalid_argument);
    EXPECT_THROW((NoiseModel{0, 1.5, 0}.validate()), std::invalid_argument);
    EXPECT_THROW((NoiseModel{0.5, 0.5, 0.1}.validate()), std::invalid_argument);
    EXPECT_THROW((NoiseModel{std::nan(""), 0, 0}.validate()), std::invalid_argument);
}

TEST(noise_model, induced_channel_is_complete) {
    for (double a : {0.0, 0.1, 0.4})
        for (double b : {0.0, 0.2})
            for (double c : {0.0, 0.3, 0.4}) {
                KrausChannel ch = NoiseModel{a, b, c}.channel();
                EXPECT_LT(KrausChannel::completeness_error(ch.matrices()), 1e-12);
            }
}

TEST(perturb, silent_noise_is_identity) {
    ppqkd::Rng rng(1);
    PureState s = encode_bit(1, Basis(0.3));
    for (int k = 0; k < 100; k++) {
        EXPECT_EQ(perturb(s, {}, rng), s);
    }
}

TEST(perturb, forced_bit_flip) {
    ppqkd::Rng rng(2);
    for (int k = 0; k < 100; k++) {
        EXPECT_TRUE(equal_up_to_phase(perturb(encode_bit(0, Basis(0)), {1, 0, 0}, rng), encode_bit(1, Basis(0))));
    }
}

TEST(perturb, rejects_invalid_probabilities) {
    ppqkd::Rng rng(3);
    EXPECT_THROW(perturb(PureState{}, {0.7, 0.7, 0}, rng), std::invalid_argument);
}

TEST(perturb, bit_flip_average_matches_channel) {
    expect_unraveling_matches_channel(encode_bit(0, Basis(0)), {0.25, 0, 0}, 11);
    expect_unraveling_matches_channel(encode_bit(1, Basis(kPi / 8)), {0.25, 0, 0}, 12);
}

TEST(perturb, average_matches_channel_on_grid) {
    uint64_t seed = 100;
    for (double pb : {0.0, 0.1, 0.3})
        for (double pp : {0.0, 0.15})
            for (double pz : {0.0, 0.2}) {
                expect_unraveling_matches_channel(encode_bit(seed & 1, Basis(0.37 * (double)seed)), {pb, pp, pz}, seed);
                seed++;
            }
}

TEST(sample_error, frequencies) {
    NoiseModel n{0.1, 0.2, 0.3};
    ppqkd::Rng rng(5);
    const size_t total = 100000;
    std::array<size_t, 5> counts{};
    for (size_t k = 0; k < total; k++) {
        counts[(size_t)sample_error(n, rng)]++;
    }
    EXPECT_TRUE(oracle::within_sigmas((double)counts[(size_t)PauliWord::X] / total, 0.1, total));
    EXPECT_TRUE(oracle::within_sigmas((double)counts[(size_t)PauliWord::Z] / total, 0.2, total));
    EXPECT_TRUE(oracle::within_sigmas((double)counts[(size_t)PauliWord::XZ] / total, 0.3, total));
    EXPECT_EQ(counts[(size_t)PauliWord::ZX], 0u);
}

TEST(eve_tap, absent_is_transparent) {
    ppqkd::Rng rng(1);
    PureState s = encode_bit(1, Basis(0.9));
    auto [out, obs] = eve_tap(s, EveStrategy{}, rng);
    EXPECT_EQ(out, s);
    EXPECT_TRUE(obs.empty());
}

TEST(eve_tap, matching_basis_leaves_state_alone) {
    EveStrategy eve{EveKind::InterceptResend, BasisPolicy::fixed(kPi / 4), LegSet::Both};
    for (uint64_t seed = 0; seed < 200; seed++) {
        ppqkd::Rng rng(seed);
        PureState s = encode_bit(0, Basis(kPi / 4));
        auto [out, obs] = eve_tap(s, eve, rng);
        EXPECT_EQ(out, s);
        ASSERT_TRUE(obs.bit.has_value());
        EXPECT_EQ(*obs.bit, 0);
        EXPECT_EQ(*obs.basis_theta, kPi / 4);
    }
}

TEST(eve_tap, mismatched_basis_collapses_to_either_eigenstate) {
    // Born rule: |<psi_{e,pi/4}|0>|^2 = 1/2 for e in {0, 1}.
    EveStrategy eve{EveKind::InterceptResend, BasisPolicy::fixed(kPi / 4), LegSet::Both};
    const size_t n = 100000;
    size_t ones = 0;
    Basis diag(kPi / 4);
    for (uint64_t seed = 0; seed < n; seed++) {
        ppqkd::Rng rng(seed);
        auto [out, obs] = eve_tap(encode_bit(0, Basis(0)), eve, rng);
        bool is0 = out == encode_bit(0, diag);
        bool is1 = out == encode_bit(1, diag);
        ASSERT_TRUE(is0 || is1);
        ASSERT_EQ(*obs.bit, is1 ? 1 : 0);
        ones += is1;
    }
    EXPECT_TRUE(oracle::within_sigmas((double)ones / n, 0.5, n));
}

TEST(eve_tap, substitute_ignores_input) {
    EveStrategy eve{EveKind::Substitute, BasisPolicy::uniform({0.0, 0.5, 1.0}), LegSet::Both};
    for (uint64_t seed = 0; seed < 200; seed++) {
        ppqkd::Rng r1(seed), r2(seed);
        auto a = eve_tap(encode_bit(0, Basis(0)), eve, r1);
        auto b = eve_tap(encode_bit(1, Basis(2.0)), eve, r2);
        EXPECT_EQ(a.first, b.first);
        EXPECT_EQ(a.second, b.second);
        EXPECT_NEAR(a.first.norm_squared(), 1, 1e-12);
    }
}

TEST(basis_policy, party_pool_resolves_and_draws_uniformly) {
    BasisPolicy p = BasisPolicy::party_pool().resolved({Basis(0.1), Basis(0.2), Basis(0.3), Basis(0.4)});
    EXPECT_FALSE(p.use_party_pool);
    ASSERT_EQ(p.pool.size(), 4u);
    ppqkd::Rng rng(6);
    std::array<size_t, 4> counts{};
    const size_t n = 40000;
    for (size_t k = 0; k < n; k++) {
        double th = p.draw(rng).theta();
        counts[(size_t)std::lround(th * 10) - 1]++;
    }
    for (size_t c : counts) {
        EXPECT_TRUE(oracle::within_sigmas((double)c / n, 0.25, n));
    }
    EXPECT_THROW(BasisPolicy::party_pool().draw(rng), std::invalid_argument);
}

TEST(eve_strategy, legs) {
    EveStrategy e{EveKind::InterceptResend, {}, LegSet::Forward};
    EXPECT_TRUE(e.acts_on(Leg::Forward));
    EXPECT_FALSE(e.acts_on(Leg::Backward));
    e.kind = EveKind::Absent;
    EXPECT_FALSE(e.acts_on(Leg::Forward));
    EXPECT_EQ(leg_set_from_name("backward"), LegSet::Backward);
    EXPECT_THROW(leg_set_from_name("sideways"), std::invalid_argument);
    EXPECT_THROW(eve_kind_from_name("Mallory"), std::invalid_argument);
}

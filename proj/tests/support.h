#ifndef PPQKD_TESTS_SUPPORT_H
#define PPQKD_TESTS_SUPPORT_H

// Test-only oracles. Nothing here calls into the code paths it is used to
// check: closed forms are written out by hand.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "ppqkd/qubit.h"

namespace ppqkd::oracle {

inline bool within_sigmas(double observed, double p, size_t n, double sigmas = 3.0) {
    double sigma = std::sqrt(p * (1 - p) / (double)n);
    return std::abs(observed - p) <= sigmas * sigma + 1e-12;
}

inline double binomial(size_t n, size_t k) {
    double r = 1;
    for (size_t j = 1; j <= k; j++) {
        r = r * (double)(n - k + j) / (double)j;
    }
    return r;
}

/// P(at least ceil(t/2) of t independent flips with rate q).
inline double binomial_tail(size_t t, double q) {
    double total = 0;
    for (size_t j = (t + 1) / 2; j <= t; j++) {
        total += binomial(t, j) * std::pow(q, (double)j) * std::pow(1 - q, (double)(t - j));
    }
    return total;
}

/// Closed-form visible flip probability for a Pauli error class in basis
/// theta, identified by (has_x, has_z).
inline double visible_flip(bool has_x, bool has_z, double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    if (has_x && has_z) {
        return 1;
    }
    if (has_x) {
        return (c * c - s * s) * (c * c - s * s);
    }
    if (has_z) {
        return (2 * s * c) * (2 * s * c);
    }
    return 0;
}

struct PauliLeg {
    double p_x = 0, p_z = 0, p_xz = 0;
};

/// Per-qubit visible error rate after a forward and a backward Pauli leg,
/// averaged over a uniformly used basis pool. Errors compose by xor of their
/// (x, z) parts; Bob's XZ and global signs do not change visibility.
inline double round_trip_error_rate(const PauliLeg &fwd, const PauliLeg &bwd, const std::vector<double> &pool) {
    struct Term {
        bool x, z;
        double p;
    };
    auto terms = [](const PauliLeg &l) {
        return std::vector<Term>{{false, false, 1 - l.p_x - l.p_z - l.p_xz},
                                 {true, false, l.p_x},
                                 {false, true, l.p_z},
                                 {true, true, l.p_xz}};
    };
    double total = 0;
    for (double theta : pool) {
        for (const Term &f : terms(fwd)) {
            for (const Term &b : terms(bwd)) {
                total += f.p * b.p * visible_flip(f.x != b.x, f.z != b.z, theta);
            }
        }
    }
    return total / (double)pool.size();
}

/// Random complete Kraus set: E_j = A_j S^{-1/2} with S = sum A_j^dag A_j,
/// for Gaussian-ish random A_j. The inverse square root uses the 2x2
/// spectral formula.
template <typename Rng>
std::vector<Mat2> random_kraus_matrices(Rng &rng, size_t count) {
    auto u = [&] { return (double)(rng() >> 11) * 0x1.0p-53 * 2 - 1; };
    std::vector<Mat2> a(count);
    Mat2 s;
    for (auto &m : a) {
        for (auto &e : m.e) {
            e = {u(), u()};
        }
        Mat2 adj;
        for (size_t r = 0; r < 2; r++) {
            for (size_t c = 0; c < 2; c++) {
                adj(r, c) = std::conj(m(c, r));
            }
        }
        Mat2 prod;
        for (size_t r = 0; r < 2; r++) {
            for (size_t c = 0; c < 2; c++) {
                prod(r, c) = adj(r, 0) * m(0, c) + adj(r, 1) * m(1, c);
            }
        }
        for (size_t k = 0; k < 4; k++) {
            s.e[k] += prod.e[k];
        }
    }
    double tr = (s(0, 0) + s(1, 1)).real();
    double det = (s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0)).real();
    double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
    double f1 = 1 / std::sqrt(l1), f2 = 1 / std::sqrt(l2);
    Mat2 inv_sqrt;
    for (size_t r = 0; r < 2; r++) {
        for (size_t c = 0; c < 2; c++) {
            std::complex<double> id = r == c ? 1.0 : 0.0;
            inv_sqrt(r, c) = (f1 * (s(r, c) - l2 * id) - f2 * (s(r, c) - l1 * id)) / (l1 - l2);
        }
    }
    std::vector<Mat2> out;
    for (const auto &m : a) {
        Mat2 e;
        for (size_t r = 0; r < 2; r++) {
            for (size_t c = 0; c < 2; c++) {
                e(r, c) = m(r, 0) * inv_sqrt(0, c) + m(r, 1) * inv_sqrt(1, c);
            }
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace ppqkd::oracle

#endif

#include "ppqkd/qubit.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppqkd {

Mat2 Mat2::identity() {
    Mat2 m;
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    return m;
}

Mat2 Mat2::adjoint() const {
    Mat2 m;
    for (size_t r = 0; r < 2; r++) {
        for (size_t c = 0; c < 2; c++) {
            m(r, c) = std::conj((*this)(c, r));
        }
    }
    return m;
}

cplx Mat2::trace() const {
    return e[0] + e[3];
}

double Mat2::max_abs_diff(const Mat2 &other) const {
    double worst = 0;
    for (size_t k = 0; k < 4; k++) {
        worst = std::max(worst, std::abs(e[k] - other.e[k]));
    }
    return worst;
}

Mat2 Mat2::operator*(const Mat2 &rhs) const {
    Mat2 m;
    for (size_t r = 0; r < 2; r++) {
        for (size_t c = 0; c < 2; c++) {
            m(r, c) = (*this)(r, 0) * rhs(0, c) + (*this)(r, 1) * rhs(1, c);
        }
    }
    return m;
}

Mat2 Mat2::operator+(const Mat2 &rhs) const {
    Mat2 m;
    for (size_t k = 0; k < 4; k++) {
        m.e[k] = e[k] + rhs.e[k];
    }
    return m;
}

Mat2 Mat2::operator-(const Mat2 &rhs) const {
    Mat2 m;
    for (size_t k = 0; k < 4; k++) {
        m.e[k] = e[k] - rhs.e[k];
    }
    return m;
}

Mat2 Mat2::operator*(cplx s) const {
    Mat2 m;
    for (size_t k = 0; k < 4; k++) {
        m.e[k] = e[k] * s;
    }
    return m;
}

double Basis::alpha() const {
    return std::cos(theta_);
}

double Basis::beta() const {
    return std::sin(theta_);
}

cplx inner(const PureState &bra, const PureState &ket) {
    return std::conj(bra.amp0) * ket.amp0 + std::conj(bra.amp1) * ket.amp1;
}

double overlap(const PureState &a, const PureState &b) {
    return std::abs(inner(a, b));
}

bool equal_up_to_phase(const PureState &a, const PureState &b, double tol) {
    // Align b's phase to a using whichever amplitude of b is larger.
    cplx ref_b = std::abs(b.amp0) >= std::abs(b.amp1) ? b.amp0 : b.amp1;
    cplx ref_a = std::abs(b.amp0) >= std::abs(b.amp1) ? a.amp0 : a.amp1;
    if (std::abs(ref_b) == 0 || std::abs(ref_a) == 0) {
        return false;
    }
    cplx phase = ref_a / ref_b;
    phase /= std::abs(phase);
    PureState aligned = b.scaled(phase);
    return std::abs(aligned.amp0 - a.amp0) <= tol && std::abs(aligned.amp1 - a.amp1) <= tol;
}

double DensityMatrix::hermiticity_error() const {
    return entries.max_abs_diff(entries.adjoint());
}

std::array<double, 2> DensityMatrix::eigenvalues() const {
    double a = entries(0, 0).real();
    double d = entries(1, 1).real();
    cplx b = (entries(0, 1) + std::conj(entries(1, 0))) * 0.5;
    double mean = (a + d) / 2;
    double half_gap = std::hypot((a - d) / 2, std::abs(b));
    return {mean - half_gap, mean + half_gap};
}

std::string_view pauli_name(PauliWord op) {
    switch (op) {
        case PauliWord::I:
            return "I";
        case PauliWord::X:
            return "X";
        case PauliWord::Z:
            return "Z";
        case PauliWord::XZ:
            return "XZ";
        case PauliWord::ZX:
            return "ZX";
    }
    throw std::invalid_argument("unknown PauliWord");
}

PauliWord pauli_from_name(std::string_view name) {
    for (PauliWord op : {PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::XZ, PauliWord::ZX}) {
        if (pauli_name(op) == name) {
            return op;
        }
    }
    std::stringstream ss;
    ss << "unknown Pauli word '" << name << "'; expected one of I, X, Z, XZ, ZX";
    throw std::invalid_argument(ss.str());
}

Mat2 pauli_matrix(PauliWord op) {
    Mat2 m;
    switch (op) {
        case PauliWord::I:
            return Mat2::identity();
        case PauliWord::X:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            return m;
        case PauliWord::Z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            return m;
        case PauliWord::XZ:
            m(0, 1) = -1.0;
            m(1, 0) = 1.0;
            return m;
        case PauliWord::ZX:
            m(0, 1) = 1.0;
            m(1, 0) = -1.0;
            return m;
    }
    throw std::invalid_argument("unknown PauliWord");
}

Mat2 PauliExpansion::matrix() const {
    return pauli_matrix(PauliWord::I) * coeffs[0] + pauli_matrix(PauliWord::X) * coeffs[1] +
           pauli_matrix(PauliWord::Z) * coeffs[2] + pauli_matrix(PauliWord::XZ) * coeffs[3];
}

PauliExpansion PauliExpansion::from_matrix(const Mat2 &m) {
    PauliExpansion p;
    p.coeffs[0] = (m(0, 0) + m(1, 1)) * 0.5;
    p.coeffs[1] = (m(0, 1) + m(1, 0)) * 0.5;
    p.coeffs[2] = (m(0, 0) - m(1, 1)) * 0.5;
    p.coeffs[3] = (m(1, 0) - m(0, 1)) * 0.5;
    return p;
}

double KrausChannel::completeness_error(const std::vector<Mat2> &operators) {
    Mat2 sum;
    for (const auto &op : operators) {
        sum = sum + op.adjoint() * op;
    }
    return sum.max_abs_diff(Mat2::identity());
}

KrausChannel::KrausChannel(std::vector<PauliExpansion> operators) : operators_(std::move(operators)) {
    if (operators_.empty()) {
        throw std::invalid_argument("KrausChannel needs at least one operator");
    }
    matrices_.reserve(operators_.size());
    for (const auto &op : operators_) {
        matrices_.push_back(op.matrix());
    }
    double err = completeness_error(matrices_);
    if (!(err <= kCompletenessTolerance)) {
        std::stringstream ss;
        ss << "KrausChannel violates completeness: max |sum E^dag E - I| = " << err;
        throw std::invalid_argument(ss.str());
    }
}

KrausChannel KrausChannel::from_matrices(const std::vector<Mat2> &operators) {
    std::vector<PauliExpansion> expansions;
    expansions.reserve(operators.size());
    for (const auto &m : operators) {
        expansions.push_back(PauliExpansion::from_matrix(m));
    }
    return KrausChannel(std::move(expansions));
}

PureState encode_bit(uint8_t bit, const Basis &basis) {
    if (bit > 1) {
        throw std::invalid_argument("encode_bit: bit must be 0 or 1");
    }
    double a = basis.alpha();
    double b = basis.beta();
    if (bit == 0) {
        return {a, b};
    }
    return {-b, a};
}

PureState apply_pauli(const PureState &s, PauliWord op) {
    switch (op) {
        case PauliWord::I:
            return s;
        case PauliWord::X:
            return {s.amp1, s.amp0};
        case PauliWord::Z:
            return {s.amp0, -s.amp1};
        case PauliWord::XZ:
            return {-s.amp1, s.amp0};
        case PauliWord::ZX:
            return {s.amp1, -s.amp0};
    }
    throw std::invalid_argument("unknown PauliWord");
}

double outcome_probability(const PureState &state, const Basis &basis, uint8_t outcome) {
    double w0 = std::norm(inner(encode_bit(0, basis), state));
    double w1 = std::norm(inner(encode_bit(1, basis), state));
    double total = w0 + w1;
    return (outcome ? w1 : w0) / total;
}

double outcome_probability(const DensityMatrix &rho, const Basis &basis, uint8_t outcome) {
    PureState v = encode_bit(outcome, basis);
    const Mat2 &r = rho.entries;
    cplx rv0 = r(0, 0) * v.amp0 + r(0, 1) * v.amp1;
    cplx rv1 = r(1, 0) * v.amp0 + r(1, 1) * v.amp1;
    return (std::conj(v.amp0) * rv0 + std::conj(v.amp1) * rv1).real();
}

uint8_t measure_in_basis(const PureState &state, const Basis &basis, Rng &rng) {
    double p1 = outcome_probability(state, basis, 1);
    return uniform01(rng) < p1 ? 1 : 0;
}

double flip_probability(const Basis &basis, PauliWord op, uint8_t bit) {
    PureState moved = apply_pauli(encode_bit(bit, basis), op);
    return std::norm(inner(encode_bit(1 - bit, basis), moved));
}

DensityMatrix to_density(const PureState &s) {
    DensityMatrix rho;
    rho.entries(0, 0) = s.amp0 * std::conj(s.amp0);
    rho.entries(0, 1) = s.amp0 * std::conj(s.amp1);
    rho.entries(1, 0) = s.amp1 * std::conj(s.amp0);
    rho.entries(1, 1) = s.amp1 * std::conj(s.amp1);
    return rho;
}

DensityMatrix apply_channel(const DensityMatrix &rho, const KrausChannel &channel) {
    DensityMatrix out;
    for (const auto &e : channel.matrices()) {
        out.entries = out.entries + e * rho.entries * e.adjoint();
    }
    return out;
}

}  // namespace ppqkd

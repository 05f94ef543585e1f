#ifndef PPQKD_QUBIT_H
#define PPQKD_QUBIT_H

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ppqkd/rng.h"

namespace ppqkd {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix.
struct Mat2 {
    std::array<cplx, 4> e{};

    cplx &operator()(size_t r, size_t c) { return e[2 * r + c]; }
    const cplx &operator()(size_t r, size_t c) const { return e[2 * r + c]; }

    static Mat2 identity();
    Mat2 adjoint() const;
    cplx trace() const;
    double max_abs_diff(const Mat2 &other) const;

    Mat2 operator*(const Mat2 &rhs) const;
    Mat2 operator+(const Mat2 &rhs) const;
    Mat2 operator-(const Mat2 &rhs) const;
    Mat2 operator*(cplx s) const;
};

/// A secret basis B_k. Real amplitudes alpha = cos(theta), beta = sin(theta),
/// so the pair {|psi_0>, |psi_1>} is orthonormal for every angle.
class Basis {
  public:
    explicit Basis(double theta = 0.0) : theta_(theta) {}

    double theta() const { return theta_; }
    double alpha() const;
    double beta() const;

    bool operator==(const Basis &other) const { return theta_ == other.theta_; }

  private:
    double theta_;
};

struct PureState {
    cplx amp0{1.0, 0.0};
    cplx amp1{0.0, 0.0};

    double norm_squared() const { return std::norm(amp0) + std::norm(amp1); }
    PureState scaled(cplx phase) const { return {amp0 * phase, amp1 * phase}; }

    bool operator==(const PureState &other) const = default;
};

/// |<a|b>|, which is blind to the global phase of either argument.
double overlap(const PureState &a, const PureState &b);
cplx inner(const PureState &bra, const PureState &ket);

/// True when a = e^{i phi} b for some phi, within tol on each amplitude.
bool equal_up_to_phase(const PureState &a, const PureState &b, double tol = 1e-12);

struct DensityMatrix {
    Mat2 entries;

    double hermiticity_error() const;
    cplx trace() const { return entries.trace(); }
    /// Both eigenvalues of the Hermitian part, ascending.
    std::array<double, 2> eigenvalues() const;
};

enum class PauliWord : uint8_t { I, X, Z, XZ, ZX };

std::string_view pauli_name(PauliWord op);
PauliWord pauli_from_name(std::string_view name);
Mat2 pauli_matrix(PauliWord op);

/// One Kraus operator in the expansion c0*I + c1*X + c2*Z + c3*XZ. Those four
/// matrices span all 2x2 complex matrices, so any operator has such a form.
struct PauliExpansion {
    std::array<cplx, 4> coeffs{};

    Mat2 matrix() const;
    static PauliExpansion from_matrix(const Mat2 &m);
};

/// Operator set {E_j} with the completeness constraint sum_j E_j^dag E_j = I.
/// Construction rejects operator sets violating it by more than 1e-10.
class KrausChannel {
  public:
    explicit KrausChannel(std::vector<PauliExpansion> operators);
    static KrausChannel from_matrices(const std::vector<Mat2> &operators);

    const std::vector<PauliExpansion> &operators() const { return operators_; }
    const std::vector<Mat2> &matrices() const { return matrices_; }

    /// max |sum_j E_j^dag E_j - I| entrywise.
    static double completeness_error(const std::vector<Mat2> &operators);

  private:
    std::vector<PauliExpansion> operators_;
    std::vector<Mat2> matrices_;
};

constexpr double kCompletenessTolerance = 1e-10;

/// alpha|i> + (-1)^i beta|1-i>.
PureState encode_bit(uint8_t bit, const Basis &basis);

PureState apply_pauli(const PureState &state, PauliWord op);

/// Born probability that measuring in `basis` yields `outcome`. Normalized by
/// the state's total weight so eigenstates give exactly 0 or 1.
double outcome_probability(const PureState &state, const Basis &basis, uint8_t outcome);
double outcome_probability(const DensityMatrix &rho, const Basis &basis, uint8_t outcome);

uint8_t measure_in_basis(const PureState &state, const Basis &basis, Rng &rng);

/// |<psi_{1-i}| op |psi_i>|^2 for the given encoded bit.
double flip_probability(const Basis &basis, PauliWord op, uint8_t bit);
/// Same quantity; it does not depend on the encoded bit.
inline double flip_probability(const Basis &basis, PauliWord op) { return flip_probability(basis, op, 0); }

DensityMatrix to_density(const PureState &state);

DensityMatrix apply_channel(const DensityMatrix &rho, const KrausChannel &channel);

}  // namespace ppqkd

#endif

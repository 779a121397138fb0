// pure_state.hpp
// Dense state vector of a multipartite pure state, and reduced density
// matrices of party subsets.
//
// Amplitude index convention: the global index of |i_1 i_2 ... i_n> is the
// mixed-radix number with party 0's digit most significant, i.e.
//   index = i_1 * (d_2 * ... * d_n) + i_2 * (d_3 * ... * d_n) + ... + i_n.
// For qubits this makes |10> = index 2, matching the usual ket reading order.

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "entangle/types.hpp"

namespace entangle {

using Complex = std::complex<double>;

class PureState {
public:
    // Requires an already-normalized amplitude vector; use normalize() to
    // build one from raw amplitudes.
    PureState(SystemShape shape, Eigen::VectorXcd amplitudes)
        : shape_(std::move(shape)), amps_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amps_.size()) != shape_.total_dim())
            throw DimensionMismatchError("amplitude vector length does not match the shape");
        double n = amps_.norm();
        if (std::abs(n - 1.0) > kNormEps)
            throw StateError("amplitudes are not normalized (norm = " + std::to_string(n) + ")");
    }

    const SystemShape& shape() const { return shape_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    int num_parties() const { return shape_.num_parties(); }
    std::size_t dim() const { return shape_.total_dim(); }
    Complex amplitude(std::size_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

    static constexpr double kNormEps = 1e-8;

private:
    SystemShape shape_;
    Eigen::VectorXcd amps_;
};

// Reduced density operator of a retained party subset. Hermiticity and unit
// trace are enforced on construction; positivity is checked where the
// eigenvalues are actually used.
class DensityMatrix {
public:
    DensityMatrix(PartySubset retained, Eigen::MatrixXcd matrix)
        : retained_(retained), matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols())
            throw DimensionMismatchError("density matrix must be square");
        double scale = matrix_.cwiseAbs().maxCoeff();
        double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > 1e-10 * scale)
            throw InvariantError("density matrix is not Hermitian within tolerance");
        if (std::abs(matrix_.trace().real() - 1.0) > 1e-10 || std::abs(matrix_.trace().imag()) > 1e-10)
            throw InvariantError("density matrix trace deviates from 1");
    }

    const PartySubset& retained() const { return retained_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

private:
    PartySubset retained_;
    Eigen::MatrixXcd matrix_;
};

}  // namespace entangle

#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qanneal {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Hard ceiling on register size; dense 2^n x 2^n storage is the limiting factor.
inline constexpr int kMaxQubits = 16;

inline std::size_t state_count(int n_qubits) { return std::size_t{1} << n_qubits; }

}  // namespace qanneal

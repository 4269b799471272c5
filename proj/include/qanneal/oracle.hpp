#pragma once

// Closed-form states for two small circular-schedule Hamiltonians, used to validate the solver.
//
//   H1(s) = cos(πs/2) X + sin(πs/2) Z
//   H2(s) = cos(πs/2) (X1 + X2) + sin(πs/2) 2 Z1 Z2
//
// Both start in the all-minus state at s = 0.

#include "qanneal/hamiltonian.hpp"
#include "qanneal/types.hpp"

namespace qanneal {

/// Density matrix of H1 at normalized time s for annealing time τ.
ComplexMatrix rho_h1(double s, double tau);

/// State vector (c0, c1, c1, c0) of H2.
ComplexVector psi_h2(double s, double tau);

ComplexMatrix rho_h2(double s, double tau);

ComplexMatrix hamiltonian_h1(double s);
ComplexMatrix hamiltonian_h2(double s);

/// Single-qubit field model whose circular-schedule Hamiltonian is H1.
IsingModel h1_model();
/// Two-qubit coupling model whose circular-schedule Hamiltonian is H2.
IsingModel h2_model();

/// ½ Σ |eigenvalues of (a − b)|. Throws Error(Shape) on mismatched dimensions.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qanneal

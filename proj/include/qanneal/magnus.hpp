#pragma once

// Magnus expansion building blocks.
//
// A step of dψ/du = 𝒜(u) ψ on u in [0, 1] is described by a MatrixPolynomial
// 𝒜(u) = sum_m C_m u^m. Every nested time-ordered integral of products of 𝒜 is
// then a finite sum of coefficient commutators weighted by rational simplex
// integrals, so all Ω_k are computed exactly from the coefficients.

#include <array>
#include <span>
#include <vector>

#include "qanneal/types.hpp"

namespace qanneal {

class MatrixPolynomial {
public:
    MatrixPolynomial() = default;
    explicit MatrixPolynomial(std::vector<ComplexMatrix> coefficients);

    static MatrixPolynomial zero(Eigen::Index dim);

    Eigen::Index dim() const { return dim_; }
    /// Highest stored power; 0 for a constant.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<ComplexMatrix>& coefficients() const { return coeffs_; }
    const ComplexMatrix& coefficient(int m) const { return coeffs_[static_cast<std::size_t>(m)]; }

    ComplexMatrix evaluate(double u) const;

    /// Antiderivative vanishing at u = 0.
    MatrixPolynomial integral() const;

    MatrixPolynomial& operator+=(const MatrixPolynomial& other);
    MatrixPolynomial& operator*=(Complex factor);

    friend MatrixPolynomial commutator(const MatrixPolynomial& x, const MatrixPolynomial& y);

private:
    std::vector<ComplexMatrix> coeffs_;
    Eigen::Index dim_ = 0;
};

struct OmegaTerm {
    int order = 0;
    ComplexMatrix matrix;  ///< Ω_order at u = 1
};

/// Ω_1 .. Ω_upto (upto <= 4) from the explicit nested-integral formulas. Degree must be <= 2.
std::vector<OmegaTerm> omega_explicit4(const MatrixPolynomial& p, int upto);

/// Ω_1 .. Ω_order (order <= 8) from the S_k^(j) recursion with Bernoulli weights.
std::vector<OmegaTerm> omega_recursive(const MatrixPolynomial& p, int order);

ComplexMatrix sum_terms(std::span<const OmegaTerm> terms);

/// Bernoulli numbers with B_1 = -1/2, for 0 <= j <= 8.
double bernoulli(int j);

/// Integral of s_1^p_1 ... s_m^p_m over 0 < s_m < ... < s_1 < 1.
double simplex_integral(std::span<const int> powers);

/// Max element of |Ω + Ω†|, relative to max(1, max |Ω|).
double anti_hermitian_defect(const ComplexMatrix& omega);

/// exp(Ω) for anti-Hermitian Ω via the eigendecomposition of the Hermitian iΩ.
/// Throws Error(NumericalConsistency) when the relative anti-Hermitian defect exceeds 1e-10.
ComplexMatrix exponentiate_omega(const ComplexMatrix& omega);

/// Order <= 4 Magnus exponent for polynomials whose coefficients are real combinations of a
/// fixed operator basis: C_m = λ * sum_b weights[m][b] * E_b.
///
/// All nested commutators of the basis are formed once; each step then reduces to scalar
/// weights and a linear combination of the cached matrices.
class StructuredMagnus4 {
public:
    static constexpr int kMaxBasis = 3;
    static constexpr int kCoefficients = 3;  ///< quadratic polynomials
    using StepWeights = std::array<std::array<double, kMaxBasis>, kCoefficients>;

    StructuredMagnus4(std::vector<ComplexMatrix> basis, int order);

    /// Bytes of cached commutators such a basis would need.
    static std::size_t cache_bytes(int basis_size, Eigen::Index dim);

    int order() const { return order_; }
    Eigen::Index dim() const { return dim_; }

    /// Ω = sum_{k <= order} Ω_k for the step described by (λ, weights).
    void omega(Complex lambda, const StepWeights& weights, ComplexMatrix& out) const;

private:
    Eigen::Index dim_ = 0;
    int order_ = 0;
    int basis_size_ = 0;
    int pair_count_ = 0;
    std::vector<ComplexMatrix> basis_;
    // Empty matrices mark commutators that vanish identically.
    std::vector<ComplexMatrix> pairs_;    // [E_b, E_c] for b < c
    std::vector<ComplexMatrix> triples_;  // [E_a, [E_b, E_c]], index a * pairs + pair
    std::vector<ComplexMatrix> quads_;    // [E_a, [E_e, [E_b, E_c]]], index (a * basis + e) * pairs + pair
};

}  // namespace qanneal

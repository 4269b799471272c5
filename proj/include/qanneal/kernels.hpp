#pragma once

// Data-parallel inner loops.
//
// Every kernel has a portable scalar reference in kernels::scalar and, on x86-64,
// an AVX2+FMA variant in kernels::avx2. The unqualified entry points dispatch to
// the best variant the running CPU supports. Set QANNEAL_ISA=scalar in the
// environment (or call set_isa) to pin the reference path.

#include <span>
#include <string_view>

#include "qanneal/types.hpp"

namespace qanneal::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when the variant was compiled in and the CPU reports the required features.
bool isa_available(Isa isa) noexcept;

Isa active_isa() noexcept;

/// Overrides the dispatch choice. Throws Error(Config) if the ISA is unavailable.
void set_isa(Isa isa);

struct AbsDiffStats {
    double max = 0.0;
    double sum = 0.0;
};

/// dst[k] += weight * src[k]
void axpy(std::span<Complex> dst, Complex weight, std::span<const Complex> src);

/// Max and sum over k of |a[k] - b[k]|.
AbsDiffStats abs_diff(std::span<const Complex> a, std::span<const Complex> b);

/// diag[v] += coeff * s_i(v) * s_j(v), with s_q(v) = +1 when bit q of v is clear and -1 otherwise.
/// Qubits are 0-based here. diag.size() must be a power of two.
void add_zz_term(std::span<double> diag, double coeff, int qubit_i, int qubit_j);

/// diag[v] += coeff * s_i(v)
void add_z_term(std::span<double> diag, double coeff, int qubit_i);

/// out[k] += coeff * in[k ^ (1 << bit)]: one X_q acting on the low index bits.
/// out.size() must be a multiple of 2^(bit+1).
void add_bit_flip(std::span<Complex> out, double coeff, std::span<const Complex> in, int bit);

/// out[k] += diag[k] * in[k]
void add_diag_product(std::span<Complex> out, std::span<const double> diag, std::span<const Complex> in);

namespace scalar {
void axpy(std::span<Complex> dst, Complex weight, std::span<const Complex> src);
AbsDiffStats abs_diff(std::span<const Complex> a, std::span<const Complex> b);
void add_zz_term(std::span<double> diag, double coeff, int qubit_i, int qubit_j);
void add_z_term(std::span<double> diag, double coeff, int qubit_i);
void add_bit_flip(std::span<Complex> out, double coeff, std::span<const Complex> in, int bit);
void add_diag_product(std::span<Complex> out, std::span<const double> diag, std::span<const Complex> in);
}  // namespace scalar

#if defined(QANNEAL_HAVE_AVX2_KERNELS)
namespace avx2 {
void axpy(std::span<Complex> dst, Complex weight, std::span<const Complex> src);
AbsDiffStats abs_diff(std::span<const Complex> a, std::span<const Complex> b);
void add_zz_term(std::span<double> diag, double coeff, int qubit_i, int qubit_j);
void add_z_term(std::span<double> diag, double coeff, int qubit_i);
void add_bit_flip(std::span<Complex> out, double coeff, std::span<const Complex> in, int bit);
void add_diag_product(std::span<Complex> out, std::span<const double> diag, std::span<const Complex> in);
}  // namespace avx2
#endif

}  // namespace qanneal::kernels

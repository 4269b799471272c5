#include <algorithm>
#include <cmath>
#include <cstdint>

#include "qanneal/kernels.hpp"

namespace qanneal::kernels::scalar {

void axpy(std::span<Complex> dst, Complex weight, std::span<const Complex> src) {
    for (std::size_t k = 0; k < dst.size(); ++k) {
        dst[k] += weight * src[k];
    }
}

AbsDiffStats abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    AbsDiffStats stats;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = std::abs(a[k] - b[k]);
        stats.max = std::max(stats.max, d);
        stats.sum += d;
    }
    return stats;
}

void add_zz_term(std::span<double> diag, double coeff, int qubit_i, int qubit_j) {
    for (std::uint64_t v = 0; v < diag.size(); ++v) {
        const auto parity = ((v >> qubit_i) ^ (v >> qubit_j)) & 1U;
        diag[v] += parity ? -coeff : coeff;
    }
}

void add_z_term(std::span<double> diag, double coeff, int qubit_i) {
    for (std::uint64_t v = 0; v < diag.size(); ++v) {
        diag[v] += ((v >> qubit_i) & 1U) ? -coeff : coeff;
    }
}

void add_bit_flip(std::span<Complex> out, double coeff, std::span<const Complex> in, int bit) {
    const std::size_t mask = std::size_t{1} << bit;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += coeff * in[k ^ mask];
    }
}

void add_diag_product(std::span<Complex> out, std::span<const double> diag, std::span<const Complex> in) {
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += diag[k] * in[k];
    }
}

}  // namespace qanneal::kernels::scalar

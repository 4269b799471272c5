// Compiled with -mavx2 -mfma; only reached through dispatch after a CPU feature check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "qanneal/kernels.hpp"

namespace qanneal::kernels::avx2 {
namespace {

// Two interleaved complex<double> per register: [re0, im0, re1, im1].
inline double* as_doubles(Complex* p) { return reinterpret_cast<double*>(p); }
inline const double* as_doubles(const Complex* p) { return reinterpret_cast<const double*>(p); }

inline double horizontal_max(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// Lane k holds the state index base + k.
inline __m256i lane_indices(std::uint64_t base) {
    return _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)), _mm256_set_epi64x(3, 2, 1, 0));
}

inline __m256d apply_sign(__m256d coeff, __m256i parity_bit) {
    return _mm256_xor_pd(coeff, _mm256_castsi256_pd(_mm256_slli_epi64(parity_bit, 63)));
}

}  // namespace

void axpy(std::span<Complex> dst, Complex weight, std::span<const Complex> src) {
    const std::size_t n = dst.size();
    const __m256d wr = _mm256_set1_pd(weight.real());
    const __m256d wi = _mm256_set1_pd(weight.imag());
    double* d = as_doubles(dst.data());
    const double* s = as_doubles(src.data());

    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d x = _mm256_loadu_pd(s + 2 * k);
        const __m256d swapped = _mm256_permute_pd(x, 0b0101);
        // even lanes: wr*re - wi*im, odd lanes: wr*im + wi*re
        const __m256d prod = _mm256_fmaddsub_pd(wr, x, _mm256_mul_pd(wi, swapped));
        _mm256_storeu_pd(d + 2 * k, _mm256_add_pd(_mm256_loadu_pd(d + 2 * k), prod));
    }
    for (; k < n; ++k) {
        dst[k] += weight * src[k];
    }
}

AbsDiffStats abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    const std::size_t n = a.size();
    const double* pa = as_doubles(a.data());
    const double* pb = as_doubles(b.data());
    __m256d vmax = _mm256_setzero_pd();
    __m256d vsum = _mm256_setzero_pd();

    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * k), _mm256_loadu_pd(pb + 2 * k));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * k + 4), _mm256_loadu_pd(pb + 2 * k + 4));
        // [|z0|^2, |z2|^2, |z1|^2, |z3|^2]; lane order is irrelevant for max and sum.
        const __m256d sq = _mm256_hadd_pd(_mm256_mul_pd(d0, d0), _mm256_mul_pd(d1, d1));
        const __m256d mag = _mm256_sqrt_pd(sq);
        vmax = _mm256_max_pd(vmax, mag);
        vsum = _mm256_add_pd(vsum, mag);
    }
    AbsDiffStats stats{horizontal_max(vmax), horizontal_sum(vsum)};
    for (; k < n; ++k) {
        const double d = std::abs(a[k] - b[k]);
        stats.max = std::max(stats.max, d);
        stats.sum += d;
    }
    return stats;
}

void add_zz_term(std::span<double> diag, double coeff, int qubit_i, int qubit_j) {
    const std::size_t n = diag.size();
    const __m256d c = _mm256_set1_pd(coeff);
    const __m128i shift_i = _mm_cvtsi32_si128(qubit_i);
    const __m128i shift_j = _mm_cvtsi32_si128(qubit_j);
    const __m256i one = _mm256_set1_epi64x(1);

    std::size_t v = 0;
    for (; v + 4 <= n; v += 4) {
        const __m256i idx = lane_indices(v);
        const __m256i parity =
            _mm256_and_si256(_mm256_xor_si256(_mm256_srl_epi64(idx, shift_i), _mm256_srl_epi64(idx, shift_j)), one);
        _mm256_storeu_pd(diag.data() + v, _mm256_add_pd(_mm256_loadu_pd(diag.data() + v), apply_sign(c, parity)));
    }
    for (; v < n; ++v) {
        const auto parity = ((v >> qubit_i) ^ (v >> qubit_j)) & 1U;
        diag[v] += parity ? -coeff : coeff;
    }
}

void add_z_term(std::span<double> diag, double coeff, int qubit_i) {
    const std::size_t n = diag.size();
    const __m256d c = _mm256_set1_pd(coeff);
    const __m128i shift_i = _mm_cvtsi32_si128(qubit_i);
    const __m256i one = _mm256_set1_epi64x(1);

    std::size_t v = 0;
    for (; v + 4 <= n; v += 4) {
        const __m256i bit = _mm256_and_si256(_mm256_srl_epi64(lane_indices(v), shift_i), one);
        _mm256_storeu_pd(diag.data() + v, _mm256_add_pd(_mm256_loadu_pd(diag.data() + v), apply_sign(c, bit)));
    }
    for (; v < n; ++v) {
        diag[v] += ((v >> qubit_i) & 1U) ? -coeff : coeff;
    }
}

void add_bit_flip(std::span<Complex> out, double coeff, std::span<const Complex> in, int bit) {
    const std::size_t n = out.size();
    const __m256d c = _mm256_set1_pd(coeff);
    double* o = as_doubles(out.data());
    const double* x = as_doubles(in.data());
    if (bit == 0) {
        // Partners k and k^1 share one register; swap its 128-bit halves.
        std::size_t k = 0;
        for (; k + 2 <= n; k += 2) {
            const __m256d v = _mm256_permute2f128_pd(_mm256_loadu_pd(x + 2 * k), _mm256_loadu_pd(x + 2 * k), 0x01);
            _mm256_storeu_pd(o + 2 * k, _mm256_fmadd_pd(c, v, _mm256_loadu_pd(o + 2 * k)));
        }
        for (; k < n; ++k) out[k] += coeff * in[k ^ 1U];
        return;
    }
    // Blocks of length 2^bit exchange with their neighbour.
    const std::size_t block = std::size_t{1} << bit;
    for (std::size_t base = 0; base + 2 * block <= n; base += 2 * block) {
        for (std::size_t k = 0; k < block; k += 2) {
            const std::size_t lo = 2 * (base + k);
            const std::size_t hi = 2 * (base + block + k);
            _mm256_storeu_pd(o + lo, _mm256_fmadd_pd(c, _mm256_loadu_pd(x + hi), _mm256_loadu_pd(o + lo)));
            _mm256_storeu_pd(o + hi, _mm256_fmadd_pd(c, _mm256_loadu_pd(x + lo), _mm256_loadu_pd(o + hi)));
        }
    }
}

void add_diag_product(std::span<Complex> out, std::span<const double> diag, std::span<const Complex> in) {
    const std::size_t n = out.size();
    double* o = as_doubles(out.data());
    const double* x = as_doubles(in.data());
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        // [d0, d0, d1, d1]
        const __m256d d = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(diag.data() + k)), 0b01010000);
        _mm256_storeu_pd(o + 2 * k, _mm256_fmadd_pd(d, _mm256_loadu_pd(x + 2 * k), _mm256_loadu_pd(o + 2 * k)));
    }
    for (; k < n; ++k) out[k] += diag[k] * in[k];
}

}  // namespace qanneal::kernels::avx2

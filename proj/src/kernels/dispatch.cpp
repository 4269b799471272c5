#include <atomic>
#include <cstdlib>
#include <string>

#include "qanneal/error.hpp"
#include "qanneal/kernels.hpp"

namespace qanneal::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(QANNEAL_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* forced = std::getenv("QANNEAL_ISA"); forced != nullptr && std::string(forced) == "scalar") {
        return Isa::Scalar;
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2());
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw Error(ErrorCode::Config, "instruction set '" + std::string(isa_name(isa)) + "' is not available");
    }
    current().store(isa, std::memory_order_relaxed);
}

#if defined(QANNEAL_HAVE_AVX2_KERNELS)
#define QANNEAL_DISPATCH(call)                  \
    if (active_isa() == Isa::Avx2) {            \
        return avx2::call;                      \
    }                                           \
    return scalar::call
#else
#define QANNEAL_DISPATCH(call) return scalar::call
#endif

void axpy(std::span<Complex> dst, Complex weight, std::span<const Complex> src) {
    QANNEAL_DISPATCH(axpy(dst, weight, src));
}

AbsDiffStats abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    QANNEAL_DISPATCH(abs_diff(a, b));
}

void add_zz_term(std::span<double> diag, double coeff, int qubit_i, int qubit_j) {
    QANNEAL_DISPATCH(add_zz_term(diag, coeff, qubit_i, qubit_j));
}

void add_z_term(std::span<double> diag, double coeff, int qubit_i) {
    QANNEAL_DISPATCH(add_z_term(diag, coeff, qubit_i));
}

void add_bit_flip(std::span<Complex> out, double coeff, std::span<const Complex> in, int bit) {
    QANNEAL_DISPATCH(add_bit_flip(out, coeff, in, bit));
}

void add_diag_product(std::span<Complex> out, std::span<const double> diag, std::span<const Complex> in) {
    QANNEAL_DISPATCH(add_diag_product(out, diag, in));
}

#undef QANNEAL_DISPATCH

}  // namespace qanneal::kernels

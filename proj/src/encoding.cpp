#include "qanneal/encoding.hpp"

#include <string_view>

#include "qanneal/error.hpp"

namespace qanneal {
namespace {

void require_nonempty(std::size_t size, std::string_view what) {
    if (size == 0) {
        throw Error(ErrorCode::InvalidInput, std::string(what) + " must have at least one element");
    }
}

void check_bit(int bit, std::size_t position) {
    if (bit != 0 && bit != 1) {
        throw Error(ErrorCode::InvalidInput, "binary element at qubit " + std::to_string(position + 1) +
                                                 " is " + std::to_string(bit) + ", expected 0 or 1");
    }
}

void check_spin(int spin, std::size_t position) {
    if (spin != 1 && spin != -1) {
        throw Error(ErrorCode::InvalidInput, "spin element at qubit " + std::to_string(position + 1) +
                                                 " is " + std::to_string(spin) + ", expected +1 or -1");
    }
}

}  // namespace

SpinVector binary_to_spin(std::span<const int> bits) {
    require_nonempty(bits.size(), "binary vector");
    SpinVector spins(bits.size());
    for (std::size_t k = 0; k < bits.size(); ++k) {
        check_bit(bits[k], k);
        spins[k] = bits[k] == 0 ? 1 : -1;
    }
    return spins;
}

BinaryVector spin_to_binary(std::span<const int> spins) {
    require_nonempty(spins.size(), "spin vector");
    BinaryVector bits(spins.size());
    for (std::size_t k = 0; k < spins.size(); ++k) {
        check_spin(spins[k], k);
        bits[k] = spins[k] == 1 ? 0 : 1;
    }
    return bits;
}

StateIndex binary_to_int(std::span<const int> bits) {
    require_nonempty(bits.size(), "binary vector");
    if (bits.size() > 63) {
        throw Error(ErrorCode::Range, "binary vector longer than 63 bits");
    }
    StateIndex value = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        check_bit(bits[k], k);
        value |= static_cast<StateIndex>(bits[k]) << k;
    }
    return value;
}

BinaryVector int_to_binary(StateIndex value, int n) {
    if (n < 1 || n > 63) {
        throw Error(ErrorCode::Range, "bit count " + std::to_string(n) + " outside [1, 63]");
    }
    if (value >> n != 0) {
        throw Error(ErrorCode::Range, "state index " + std::to_string(value) + " does not fit in " +
                                          std::to_string(n) + " qubits");
    }
    BinaryVector bits(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        bits[static_cast<std::size_t>(k)] = static_cast<int>((value >> k) & 1U);
    }
    return bits;
}

SpinVector int_to_spin(StateIndex value, int n) { return binary_to_spin(int_to_binary(value, n)); }

StateIndex spin_to_int(std::span<const int> spins) { return binary_to_int(spin_to_binary(spins)); }

std::string spin_to_braket(std::span<const int> spins, GlyphStyle style) {
    require_nonempty(spins.size(), "spin vector");
    const std::string_view up = style == GlyphStyle::Unicode ? "↑" : "u";
    const std::string_view down = style == GlyphStyle::Unicode ? "↓" : "d";
    std::string out = "|";
    for (std::size_t k = spins.size(); k-- > 0;) {
        check_spin(spins[k], k);
        out += spins[k] == 1 ? up : down;
    }
    out += style == GlyphStyle::Unicode ? "⟩" : ">";
    return out;
}

std::string binary_to_braket(std::span<const int> bits, GlyphStyle style) {
    require_nonempty(bits.size(), "binary vector");
    std::string out = "|";
    for (std::size_t k = bits.size(); k-- > 0;) {
        check_bit(bits[k], k);
        out += bits[k] == 0 ? '0' : '1';
    }
    out += style == GlyphStyle::Unicode ? "⟩" : ">";
    return out;
}

std::string int_to_braket(StateIndex value, int n, GlyphStyle style) {
    return spin_to_braket(int_to_spin(value, n), style);
}

}  // namespace qanneal

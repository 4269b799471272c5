#pragma once

// Labels for computational basis states.
//
// Arrays are little-endian: element 0 is qubit 1 and occupies the least
// significant bit of the integer label. Bra-ket strings display the reverse
// (big-endian) order, so "|100>" is the binary vector [0,0,1].

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qanneal {

using BinaryVector = std::vector<int>;
using SpinVector = std::vector<int>;
using StateIndex = std::uint64_t;

enum class GlyphStyle { Unicode, Ascii };

SpinVector binary_to_spin(std::span<const int> bits);
BinaryVector spin_to_binary(std::span<const int> spins);

StateIndex binary_to_int(std::span<const int> bits);
BinaryVector int_to_binary(StateIndex value, int n);

SpinVector int_to_spin(StateIndex value, int n);
StateIndex spin_to_int(std::span<const int> spins);

/// Up arrow for spin +1, down arrow for -1; "u"/"d" with GlyphStyle::Ascii.
std::string spin_to_braket(std::span<const int> spins, GlyphStyle style = GlyphStyle::Unicode);
std::string binary_to_braket(std::span<const int> bits, GlyphStyle style = GlyphStyle::Unicode);

/// Bra-ket label of the basis state with the given index.
std::string int_to_braket(StateIndex value, int n, GlyphStyle style = GlyphStyle::Unicode);

}  // namespace qanneal

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "sshq/errors.hpp"

namespace sshq {

/// Computational-basis index. Qubit 0 (chain site 1) is the most significant of the
/// `num_qubits` low bits, so the index reads left to right like the printed bitstring.
using Bits = std::uint64_t;

inline constexpr int kMaxQubits = 24;

constexpr int bit_position(int qubit, int num_qubits) { return num_qubits - 1 - qubit; }

constexpr int bit_at(Bits bits, int qubit, int num_qubits) {
    return static_cast<int>((bits >> bit_position(qubit, num_qubits)) & 1U);
}

constexpr Bits flip_bit(Bits bits, int qubit, int num_qubits) {
    return bits ^ (Bits{1} << bit_position(qubit, num_qubits));
}

inline int hamming_weight(Bits bits) { return std::popcount(bits); }

inline std::string to_bitstring(Bits bits, int num_qubits) {
    std::string out(static_cast<std::size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q) {
        if (bit_at(bits, q, num_qubits)) out[static_cast<std::size_t>(q)] = '1';
    }
    return out;
}

inline Bits parse_bitstring(std::string_view text) {
    if (text.empty() || text.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw InputError("bitstring length must be in [1, 24], got '" + std::string(text) + "'");
    }
    Bits out = 0;
    for (char c : text) {
        if (c != '0' && c != '1') throw InputError("bitstring contains non-binary character: '" + std::string(text) + "'");
        out = (out << 1) | static_cast<Bits>(c == '1');
    }
    return out;
}

/// Gathers the bits of `qubits` (in the given order, first = most significant) into a
/// compact index over the subsystem.
inline Bits extract_bits(Bits bits, std::span<const int> qubits, int num_qubits) {
    Bits out = 0;
    for (int q : qubits) out = (out << 1) | static_cast<Bits>(bit_at(bits, q, num_qubits));
    return out;
}

} // namespace sshq

#pragma once

// Plain-text shot table files, one per time point:
//
//   # sshq shot table v1
//   # L 8
//   # N_U 100
//   # N_M 4096
//   # seed 42
//   # t 0.392699081699
//   # unitary <u_index> <qubit> <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
//   <u_index> <bitstring> <count>
//
// Bitstrings list site 1 first. Identity-basis tables (twist data) use u_index 0,
// N_U 0 and carry no unitary lines.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sshq/randmeas.hpp"

namespace sshq {

struct ShotFileHeader {
    int L = 0;
    int n_unitaries = 0;
    std::uint64_t n_shots = 0;
    std::uint64_t seed = 0;
    double t = 0.0;
};

struct ShotFile {
    ShotFileHeader header;
    std::vector<ShotTable> tables;
};

void write_shot_tables(std::ostream& out, const ShotFileHeader& header, std::span<const ShotTable> tables);
void write_shot_tables(const std::filesystem::path& path, const ShotFileHeader& header, std::span<const ShotTable> tables);

/// Throws InputError with a line number on malformed input or when a table's total
/// disagrees with N_M.
ShotFile read_shot_tables(std::istream& in);
ShotFile read_shot_tables(const std::filesystem::path& path);

} // namespace sshq

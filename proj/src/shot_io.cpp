#include "sshq/shot_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sshq {

namespace {

constexpr const char* kMagic = "# sshq shot table v1";

[[noreturn]] void fail(int line, const std::string& what) {
    throw InputError(fmt::format("shot file line {}: {}", line, what));
}

} // namespace

void write_shot_tables(std::ostream& out, const ShotFileHeader& header, std::span<const ShotTable> tables) {
    fmt::print(out, "{}\n# L {}\n# N_U {}\n# N_M {}\n# seed {}\n# t {:.17g}\n", kMagic, header.L, header.n_unitaries,
               header.n_shots, header.seed, header.t);
    for (const auto& table : tables) {
        if (table.num_qubits() != header.L) throw InputError("shot table qubit count disagrees with header");
        if (table.u_index != 0) {
            for (std::size_t q = 0; q < table.unitaries.size(); ++q) {
                const auto& u = table.unitaries[q];
                fmt::print(out, "# unitary {} {}", table.u_index, q);
                for (int r = 0; r < 2; ++r) {
                    for (int c = 0; c < 2; ++c) fmt::print(out, " {:.17g} {:.17g}", u(r, c).real(), u(r, c).imag());
                }
                out << '\n';
            }
        }
        for (const auto& [bits, n] : table.counts.hist) fmt::print(out, "{} {} {}\n", table.u_index, to_bitstring(bits, header.L), n);
    }
}

void write_shot_tables(const std::filesystem::path& path, const ShotFileHeader& header, std::span<const ShotTable> tables) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    write_shot_tables(out, header, tables);
}

ShotFile read_shot_tables(std::istream& in) {
    ShotFile file;
    std::map<int, ShotTable> tables;
    std::string line;
    int lineno = 0;
    bool saw_magic = false;
    std::map<std::string, bool> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line == kMagic) {
                saw_magic = true;
                continue;
            }
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "unitary") {
                int u = 0;
                std::size_t q = 0;
                ss >> u >> q;
                Matrix2<double> m;
                for (int r = 0; r < 2; ++r) {
                    for (int c = 0; c < 2; ++c) {
                        double re = 0, im = 0;
                        ss >> re >> im;
                        m(r, c) = {re, im};
                    }
                }
                if (!ss) fail(lineno, "malformed unitary line");
                auto& t = tables[u];
                if (t.unitaries.size() != q) fail(lineno, "unitary lines out of order");
                t.unitaries.push_back(m);
                continue;
            }
            if (key == "L") ss >> file.header.L;
            else if (key == "N_U") ss >> file.header.n_unitaries;
            else if (key == "N_M") ss >> file.header.n_shots;
            else if (key == "seed") ss >> file.header.seed;
            else if (key == "t") ss >> file.header.t;
            else continue; // free-form comment
            if (!ss) fail(lineno, "malformed header field " + key);
            seen[key] = true;
            continue;
        }
        if (!saw_magic) fail(lineno, "missing '# sshq shot table v1' header");
        if (!seen["L"]) fail(lineno, "data before the L header");
        std::istringstream ss(line);
        int u = 0;
        std::string bits;
        std::uint64_t count = 0;
        std::string extra;
        if (!(ss >> u >> bits >> count) || (ss >> extra)) fail(lineno, "expected '<u_index> <bitstring> <count>'");
        if (static_cast<int>(bits.size()) != file.header.L) fail(lineno, fmt::format("bitstring length {} != L = {}", bits.size(), file.header.L));
        Bits b = 0;
        try {
            b = parse_bitstring(bits);
        } catch (const InputError& e) {
            fail(lineno, e.what());
        }
        auto& t = tables[u];
        t.u_index = u;
        t.counts.num_qubits = file.header.L;
        t.counts.hist[b] += count;
    }
    if (!saw_magic) fail(lineno, "missing '# sshq shot table v1' header");
    for (auto& [u, t] : tables) {
        t.u_index = u;
        t.counts.num_qubits = file.header.L;
        if (!t.unitaries.empty() && static_cast<int>(t.unitaries.size()) != file.header.L) {
            throw InputError(fmt::format("shot file: table {} has {} unitaries, expected L = {}", u, t.unitaries.size(), file.header.L));
        }
        if (file.header.n_shots != 0 && t.total() != file.header.n_shots) {
            throw InputError(fmt::format("shot file: table {} has {} shots, header says N_M = {}", u, t.total(), file.header.n_shots));
        }
        file.tables.push_back(std::move(t));
    }
    return file;
}

ShotFile read_shot_tables(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return read_shot_tables(in);
}

} // namespace sshq

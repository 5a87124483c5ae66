#include "sshq/circuit.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "sshq/gates.hpp"

namespace sshq {

std::string to_string(Boundary b) { return b == Boundary::Periodic ? "pbc" : "obc"; }
std::string to_string(InitialState s) { return s == InitialState::Neel ? "neel" : "singlet"; }

Circuit::Circuit(int num_qubits) : num_qubits_(num_qubits), qubit_depth_(static_cast<std::size_t>(std::max(num_qubits, 0)), 0) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) throw CapacityError(fmt::format("circuit qubit count {} outside [1, 24]", num_qubits));
}

Circuit& Circuit::add(Gate gate) {
    int lo = 0;
    int hi = 0;
    if (const auto* g1 = std::get_if<Gate1>(&gate)) {
        lo = hi = g1->target();
    } else {
        const auto& g2 = std::get<Gate2>(gate);
        lo = std::min(g2.first(), g2.second());
        hi = std::max(g2.first(), g2.second());
    }
    if (lo < 0 || hi >= num_qubits_) throw InputError(fmt::format("gate on qubit {} outside {}-qubit circuit", hi, num_qubits_));
    int layer = 0;
    for (int q = lo; q <= hi; ++q) layer = std::max(layer, qubit_depth_[static_cast<std::size_t>(q)]);
    for (int q = lo; q <= hi; ++q) qubit_depth_[static_cast<std::size_t>(q)] = layer + 1;
    layer_count_ = std::max(layer_count_, layer + 1);
    layer_of_.push_back(layer);
    gates_.push_back(std::move(gate));
    return *this;
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.num_qubits_ != num_qubits_) throw InputError("cannot append circuits with different qubit counts");
    for (const auto& g : other.gates_) add(g);
    return *this;
}

std::vector<std::vector<std::size_t>> Circuit::layers() const {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(layer_count_));
    for (std::size_t i = 0; i < gates_.size(); ++i) out[static_cast<std::size_t>(layer_of_[i])].push_back(i);
    return out;
}

int layer_count(const Circuit& circuit) { return circuit.layer_count(); }

QuantumState& apply_circuit(const Circuit& circuit, QuantumState& state) {
    if (circuit.num_qubits() != state.num_qubits()) throw InputError("circuit and state qubit counts differ");
    for (const auto& g : circuit.gates()) state.apply(g);
    return state;
}

QuantumState run_circuit(const Circuit& circuit, QuantumState state) {
    apply_circuit(circuit, state);
    return state;
}

namespace {

void require_even(int L, const char* what) {
    if (L < 2 || L % 2 != 0) throw InputError(fmt::format("{}: chain length L must be even and >= 2, got {}", what, L));
}

void add_zz_block(Circuit& c, int a, int b, double t) {
    c.add(gates::cx(a, b));
    c.add(gates::rz(b, 2 * t));
    c.add(gates::cx(a, b));
}

} // namespace

Circuit prepare_neel(int L) {
    require_even(L, "prepare_neel");
    Circuit c(L);
    for (int q = 0; q < L; q += 2) c.add(gates::x(q));
    return c;
}

Circuit prepare_singlet_product(int L) {
    require_even(L, "prepare_singlet_product");
    Circuit c(L);
    for (int q = 0; q < L; q += 2) {
        c.add(gates::x(q));
        c.add(gates::x(q + 1));
    }
    for (int q = 0; q < L; q += 2) c.add(gates::h(q));
    for (int q = 0; q < L; q += 2) c.add(gates::cx(q, q + 1));
    return c;
}

Circuit prepare_initial(InitialState initial, int L) {
    return initial == InitialState::Neel ? prepare_neel(L) : prepare_singlet_product(L);
}

std::vector<std::pair<int, int>> evolution_links(int L, Boundary boundary) {
    require_even(L, "evolution_links");
    std::vector<std::pair<int, int>> links;
    // Site 2j (1-based) is qubit 2j-1.
    for (int q = 1; q + 1 < L; q += 2) links.emplace_back(q, q + 1);
    if (boundary == Boundary::Periodic && L > 2) links.emplace_back(L - 1, 0);
    if (boundary == Boundary::Periodic && L == 2) links.emplace_back(1, 0);
    return links;
}

Circuit evolution_circuit(double t, int L, Boundary boundary, EvolutionMode mode) {
    Circuit c(L);
    for (const auto& [a, b] : evolution_links(L, boundary)) {
        if (mode == EvolutionMode::Fused) {
            c.add(gates::xy_exchange(a, b, t));
            continue;
        }
        // U^{xx}(t) = (H x H) U^{zz}(t) (H x H)
        c.add(gates::h(a));
        c.add(gates::h(b));
        add_zz_block(c, a, b, t);
        c.add(gates::h(a));
        c.add(gates::h(b));
        // U^{yy}(t) = (SH x SH) U^{zz}(t) (HS^dg x HS^dg)
        c.add(gates::sdg(a));
        c.add(gates::sdg(b));
        c.add(gates::h(a));
        c.add(gates::h(b));
        add_zz_block(c, a, b, t);
        c.add(gates::h(a));
        c.add(gates::h(b));
        c.add(gates::s(a));
        c.add(gates::s(b));
    }
    return c;
}

void dump_circuit(const Circuit& circuit, std::ostream& out) {
    for (const auto& gate : circuit.gates()) {
        std::visit(
            [&out](const auto& g) {
                using G = std::decay_t<decltype(g)>;
                out << g.name();
                if constexpr (std::is_same_v<G, Gate1>) {
                    out << ' ' << g.target();
                } else {
                    out << ' ' << g.first() << ' ' << g.second();
                }
                if (g.param()) out << ' ' << fmt::format("{:.12g}", *g.param());
                out << '\n';
            },
            gate);
    }
}

void QuenchSpec::validate() const {
    if (L > kMaxQubits) throw CapacityError(fmt::format("L: {} exceeds the 24-qubit limit", L));
    if (L < 4 || L % 2 != 0) throw InputError(fmt::format("L: chain length must be even and >= 4, got {}", L));
    if (symmetric_bipartition && L % 4 != 0) throw InputError(fmt::format("L: symmetric bipartition needs L divisible by 4, got {}", L));
    if (times.empty()) throw InputError("times: time grid is empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0) throw InputError("times: negative time");
        if (i > 0 && !(times[i] > times[i - 1])) throw InputError("times: grid must be strictly increasing");
    }
    if (n_unitaries < 1) throw InputError("n_unitaries: must be >= 1");
    if (n_shots < 1) throw InputError("n_shots: must be >= 1");
    if (!(p_layer >= 0.0 && p_layer <= 1.0)) throw InputError("p_layer: must lie in [0, 1]");
    if (!(readout_flip >= 0.0 && readout_flip <= 0.5)) throw InputError("readout_flip: must lie in [0, 0.5]");
}

} // namespace sshq

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sshq/state.hpp"

namespace sshq {

enum class Boundary { Periodic, Open };
enum class InitialState { Neel, Singlet };

std::string to_string(Boundary b);
std::string to_string(InitialState s);

/// Ordered gate list with an as-soon-as-possible layer assignment.
///
/// Layers are computed for a linear qubit layout: a two-qubit gate on (a, b) occupies
/// every qubit between a and b, so the periodic link (L, 1) cannot share a layer with
/// anything. This models a line of qubits without simulating SWAP routing.
class Circuit {
  public:
    explicit Circuit(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::vector<int>& gate_layers() const { return layer_of_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Circuit& add(Gate gate);
    Circuit& append(const Circuit& other);

    int layer_count() const { return layer_count_; }
    /// Gate indices grouped by layer.
    std::vector<std::vector<std::size_t>> layers() const;

  private:
    int num_qubits_;
    std::vector<Gate> gates_;
    std::vector<int> layer_of_;
    std::vector<int> qubit_depth_;
    int layer_count_ = 0;
};

int layer_count(const Circuit& circuit);

/// Applies every gate in order.
QuantumState& apply_circuit(const Circuit& circuit, QuantumState& state);
QuantumState run_circuit(const Circuit& circuit, QuantumState state);

/// X on every odd site: |0...0> -> |1010...>.
Circuit prepare_neel(int L);
/// (C_X)(H x I)(X x X) on every intracell pair (2j-1, 2j): product of (|01> - |10>)/sqrt2.
Circuit prepare_singlet_product(int L);
Circuit prepare_initial(InitialState initial, int L);

/// Even links (2j, 2j+1) as 0-based qubit pairs, plus (L, 1) for periodic chains.
std::vector<std::pair<int, int>> evolution_links(int L, Boundary boundary);

enum class EvolutionMode {
    /// U^{xx} and U^{yy} as (H)- and (S,H)-conjugated CX-RZ(2t)-CX blocks.
    Decomposed,
    /// One dense closed-form 4x4 block per link.
    Fused,
};

/// Exact flat-band evolution U(t) = prod_links exp(-i t (XX + YY)) for (J, J') = (0, 1).
/// Open chains with L = 2 have no even link and yield an empty circuit.
Circuit evolution_circuit(double t, int L, Boundary boundary, EvolutionMode mode = EvolutionMode::Decomposed);

/// One gate per line: `NAME q1 [q2] [param]`, 0-based qubit indices.
void dump_circuit(const Circuit& circuit, std::ostream& out);

/// Full experiment description for one quench run.
struct QuenchSpec {
    int L = 4;
    Boundary boundary = Boundary::Periodic;
    InitialState initial = InitialState::Neel;
    std::vector<double> times;
    int n_unitaries = 100;
    std::uint64_t n_shots = 4096;
    double p_layer = 0.0;
    double readout_flip = 0.0;
    std::uint64_t seed = 1;
    /// Symmetric-bipartition entropy runs additionally need L % 4 == 0.
    bool symmetric_bipartition = false;

    /// Throws InputError naming the offending field.
    void validate() const;
};

} // namespace sshq

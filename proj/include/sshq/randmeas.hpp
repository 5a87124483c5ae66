#pragma once

// Randomized-measurement purity estimation: local Haar rotations, computational-basis
// shots, and the Hamming-distance pair estimator
//   Tr[rho_A^2] = 2^{N_A} sum_{s,s'} (-2)^{-D[s,s']} avg_U[P(s) P(s')].

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sshq/state.hpp"

namespace sshq {

/// Shots collected after one set of local rotations (u_index 0 = no rotation).
struct ShotTable {
    int u_index = 0;
    Counts counts;
    /// The L single-qubit rotations applied before measurement; empty for identity tables.
    std::vector<Matrix2<double>> unitaries;

    int num_qubits() const { return counts.num_qubits; }
    std::uint64_t total() const { return counts.total(); }
};

enum class EstimatorVariant {
    /// Squared empirical frequencies, exactly as the pair formula is written; O(1/N_M) bias.
    PlugIn,
    /// Distinct-shot pairs only (U-statistic); unbiased for every N_M >= 2.
    Unbiased,
};

struct PurityEstimate {
    double value = 0.0;
    /// Standard error of the mean over unitaries (0 for a single unitary).
    double std_error = 0.0;
    std::vector<int> subsystem;
    EstimatorVariant variant = EstimatorVariant::Unbiased;
    std::vector<double> per_unitary;
};

/// Circular-ensemble 2x2 unitary: phase-fixed QR (Gram-Schmidt) of a complex Ginibre matrix.
Matrix2<double> sample_haar_unitary(std::mt19937_64& rng);

/// Basis changes {I, H, H S^dg} mapping Z-basis measurement to Z, X and Y measurement.
/// Averaging the pair estimator over all 3^N products reproduces the Haar average exactly.
std::vector<Matrix2<double>> pauli_measurement_bases();

enum class UnitarySource { Haar, Identity };

struct MeasurementOptions {
    /// Global depolarizing probability mixed into every outcome distribution.
    double p_tot = 0.0;
    /// Per-bit readout flip probability.
    double readout_flip = 0.0;
    /// Identity is a test hook: every table is measured in the computational basis.
    UnitarySource source = UnitarySource::Haar;
    /// Worker threads for the per-unitary map (0 = hardware concurrency).
    unsigned threads = 1;
    /// Time-grid coordinate folded into child seeds.
    std::uint64_t time_index = 0;
};

/// Rotates a copy of `state` by the given per-qubit unitaries.
QuantumState rotate_locally(const QuantumState& state, std::span<const Matrix2<double>> unitaries);

/// One table: draw L unitaries from `rng`, rotate, mix noise, sample shots, flip readout.
ShotTable measure_randomized(const QuantumState& state, int u_index, std::uint64_t n_shots, std::mt19937_64& rng,
                             const MeasurementOptions& options = {});

/// N_U tables with child seeds derived from (master_seed, time_index, u). Bitwise
/// reproducible for any thread count.
std::vector<ShotTable> run_randomized_measurements(const QuantumState& state, int n_unitaries, std::uint64_t n_shots,
                                                   std::uint64_t master_seed, const MeasurementOptions& options = {});

/// 2^N sum_{s,s'} (-2)^{-D[s,s']} p(s) p(s') via a per-qubit kernel transform, O(N 2^N).
double hamming_pair_sum(const Eigen::VectorXd& probs, int n_qubits);

/// Per-unitary statistic for one table marginalized to `subset` (0-based qubits).
double purity_statistic(const Counts& counts, std::span<const int> subset, EstimatorVariant variant);
/// Infinite-shot statistic for one exact distribution.
double purity_statistic(const Distribution& dist, std::span<const int> subset);

/// Averages the per-unitary statistic over tables. Throws InputError for no tables,
/// inconsistent L, or an out-of-range subset.
PurityEstimate estimate_purity(std::span<const ShotTable> tables, std::span<const int> subset,
                               EstimatorVariant variant = EstimatorVariant::Unbiased);
/// Same estimator with exact per-unitary probabilities in place of shot frequencies.
PurityEstimate estimate_purity(std::span<const Distribution> exact_distributions, std::span<const int> subset);

/// Exact 2-design average: enumerates the 3^{|subset|} Pauli measurement bases on the
/// subset (other qubits unrotated) and returns the averaged statistic for `state`, after
/// the optional depolarizing mix and readout-flip channel.
double design_averaged_purity(const QuantumState& state, std::span<const int> subset, double p_tot = 0.0,
                              double readout_flip = 0.0);

/// S_2 = -log2(purity); nonpositive purities give an empty value (missing data point).
std::optional<double> renyi2(double purity);

} // namespace sshq

#pragma once

// Noise injection at the distribution/bitstring level and the matching mitigation:
// global depolarizing inversion of purities and constant-shift alignment of entropy
// time series.

#include <optional>
#include <random>
#include <vector>

#include "sshq/state.hpp"

namespace sshq {

struct NoiseSpec {
    /// Global depolarizing probability per circuit layer.
    double p_layer = 0.0;
    /// Independent per-bit readout flip probability.
    double readout_flip = 0.0;

    void validate() const;
    bool noiseless() const { return p_layer == 0.0 && readout_flip == 0.0; }
};

/// p_tot = 1 - (1 - p_layer)^n_layers.
double effective_p_tot(double p_layer, int n_layers);

/// P(s) -> (1 - p_tot) P(s) + p_tot / 2^L.
Distribution apply_depolarizing(const Distribution& dist, double p_tot);

Bits apply_readout_flip(Bits bits, int num_qubits, double q, std::mt19937_64& rng);
/// Flips every recorded shot independently.
Counts apply_readout_flip(const Counts& counts, double q, std::mt19937_64& rng);
/// Infinite-shot version: the per-bit flip channel applied to a distribution.
Distribution apply_readout_flip(const Distribution& dist, double q);

/// Subsystem purity of (1-p) rho + p 1/2^L given the exact subsystem purity:
/// (1-p)^2 P + p(1-p)/2^{N_I - 1} + p^2/2^{N_I}.
double depolarized_purity(double exact_purity, double p_tot, int n_qubits);

struct PTotEstimate {
    double p_tot = 0.0;
    /// Measured purity fell outside [2^-L, 1] beyond tolerance and was clamped.
    bool clamped = false;
};

/// Inverts the full-system relation (exact purity 1) by bisection.
PTotEstimate estimate_p_tot_from_full_purity(double measured_full_purity, int L);

struct MitigatedPurity {
    double value = 0.0;
    bool clamped = false;
};

/// Solves the depolarized-purity relation for the exact subsystem purity; the result
/// is clamped to [2^{-N_I}, 1] with a flag. p_tot = 1 is undefined and throws.
MitigatedPurity mitigate_purity(double noisy_purity, double p_tot, int n_qubits);

enum class ShiftMode { ZeroAtT0, ValleyToZero };

struct TimeSeries {
    std::vector<double> t;
    /// Missing points (e.g. nonpositive purity estimates) are empty.
    std::vector<std::optional<double>> value;
};

struct AlignedSeries {
    TimeSeries series;
    double offset = 0.0;
    ShiftMode mode = ShiftMode::ZeroAtT0;
};

/// Indices of valley minima: local minima (endpoints included) strictly below the
/// series median. Missing points are skipped.
std::vector<std::size_t> find_valleys(const TimeSeries& series);

/// Subtracts a constant offset: the first value (ZeroAtT0) or the mean valley minimum
/// (ValleyToZero). Throws InputError for an empty series or when no valley exists.
AlignedSeries shift_align(const TimeSeries& series, ShiftMode mode);

} // namespace sshq

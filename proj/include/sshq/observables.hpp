#pragma once

// Twist-operator observables evaluated on computational-basis data. The twist operator
// is diagonal, so bitstring histograms suffice; the exact references use |amplitude|^2.

#include <complex>
#include <cstdint>

#include "sshq/state.hpp"

namespace sshq {

enum class TwistKind {
    /// z_L^(q): phase q (pi/L) sum_j j (1 - 2 s_j).
    Spin,
    /// z_N^(q): phase q (2pi/L) sum_j j (1 - s_j), with n_j = 1 - s_j.
    Particle,
};

enum class TwistSource { Raw, Postselected, Exact };

std::string to_string(TwistSource s);

inline constexpr int kDefaultSpinTwistPower = 1;
inline constexpr int kDefaultParticleTwistPower = 2;
/// Below this |z| the argument is noise-dominated.
inline constexpr double kBerryReliabilityThreshold = 1e-3;

struct BerryPhase {
    /// Principal argument in (-pi, pi].
    double gamma = 0.0;
    bool reliable = true;
};

struct TwistResult {
    std::complex<double> z;
    int q = 1;
    TwistSource source = TwistSource::Raw;
    TwistKind kind = TwistKind::Spin;
    int L = 0;

    /// Principal argument of z, flagged when |z| < kBerryReliabilityThreshold.
    BerryPhase berry() const;
    /// <X> from gamma = (2 pi q / L) <X>.
    double position() const;
    /// P = -gamma / 2pi (unit charge).
    double polarization() const;
};

/// Phase angle of one bitstring.
double twist_angle(Bits bits, int L, int q, TwistKind kind);

/// Weighted phase sum with P(s) = count / total. Empty counts throw InputError.
TwistResult twist_expectation(const Counts& counts, int q, TwistKind kind, TwistSource source = TwistSource::Raw);
TwistResult twist_expectation(const Distribution& dist, int q, TwistKind kind, TwistSource source = TwistSource::Exact);

TwistResult twist_order_parameter(const Counts& counts, int q = kDefaultSpinTwistPower, TwistSource source = TwistSource::Raw);
TwistResult twist_order_parameter(const Distribution& dist, int q = kDefaultSpinTwistPower);
TwistResult particle_twist_amplitude(const Counts& counts, int q = kDefaultParticleTwistPower, TwistSource source = TwistSource::Raw);
TwistResult particle_twist_amplitude(const Distribution& dist, int q = kDefaultParticleTwistPower);

/// Sum_s |amplitude_s|^2 exp(i angle(s)).
TwistResult exact_twist(const QuantumState& state, int q, TwistKind kind);

/// gamma = Arg z on the branch (-pi, pi] with Arg(-1) = +pi.
BerryPhase berry_phase(std::complex<double> z);
BerryPhase berry_phase(const TwistResult& z);

struct Postselected {
    Counts counts;
    std::uint64_t rejected = 0;
    /// Every shot was rejected.
    bool empty = false;
};

/// Keeps bitstrings of Hamming weight L/2. L must be even.
Postselected postselect_half_filling(const Counts& counts);
/// Distribution restricted to weight L/2 and renormalized; throws InvariantError when
/// that sector has no mass.
Distribution postselect_half_filling(const Distribution& dist);

} // namespace sshq

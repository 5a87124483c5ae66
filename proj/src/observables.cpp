#include "sshq/observables.hpp"

#include <cmath>
#include <numbers>

namespace sshq {

std::string to_string(TwistSource s) {
    switch (s) {
    case TwistSource::Raw: return "raw";
    case TwistSource::Postselected: return "postselected";
    case TwistSource::Exact: return "exact";
    }
    return "?";
}

BerryPhase berry_phase(std::complex<double> z) {
    BerryPhase out;
    out.gamma = std::arg(z);
    if (out.gamma <= -std::numbers::pi) out.gamma = std::numbers::pi;
    out.reliable = std::abs(z) >= kBerryReliabilityThreshold;
    return out;
}

BerryPhase berry_phase(const TwistResult& z) { return berry_phase(z.z); }

BerryPhase TwistResult::berry() const { return berry_phase(z); }

double TwistResult::position() const { return static_cast<double>(L) * berry().gamma / (2.0 * std::numbers::pi * q); }

double TwistResult::polarization() const { return -berry().gamma / (2.0 * std::numbers::pi); }

double twist_angle(Bits bits, int L, int q, TwistKind kind) {
    // Integer site sums keep the angle exact before the final scaling.
    long long sum = 0;
    for (int j = 1; j <= L; ++j) {
        const int s = bit_at(bits, j - 1, L);
        sum += kind == TwistKind::Spin ? j * (1 - 2 * s) : j * (1 - s);
    }
    const double unit = kind == TwistKind::Spin ? std::numbers::pi / L : 2.0 * std::numbers::pi / L;
    return q * unit * static_cast<double>(sum);
}

TwistResult twist_expectation(const Counts& counts, int q, TwistKind kind, TwistSource source) {
    const std::uint64_t total = counts.total();
    if (total == 0) throw InputError("twist estimator needs at least one shot");
    std::complex<double> z{0.0, 0.0};
    for (const auto& [bits, n] : counts.hist) z += static_cast<double>(n) * std::polar(1.0, twist_angle(bits, counts.num_qubits, q, kind));
    return {z / static_cast<double>(total), q, source, kind, counts.num_qubits};
}

TwistResult twist_expectation(const Distribution& dist, int q, TwistKind kind, TwistSource source) {
    std::complex<double> z{0.0, 0.0};
    for (Eigen::Index i = 0; i < dist.dimension(); ++i) {
        const double p = dist.probs[i];
        if (p != 0.0) z += p * std::polar(1.0, twist_angle(static_cast<Bits>(i), dist.num_qubits, q, kind));
    }
    return {z, q, source, kind, dist.num_qubits};
}

TwistResult twist_order_parameter(const Counts& counts, int q, TwistSource source) {
    return twist_expectation(counts, q, TwistKind::Spin, source);
}

TwistResult twist_order_parameter(const Distribution& dist, int q) { return twist_expectation(dist, q, TwistKind::Spin); }

TwistResult particle_twist_amplitude(const Counts& counts, int q, TwistSource source) {
    return twist_expectation(counts, q, TwistKind::Particle, source);
}

TwistResult particle_twist_amplitude(const Distribution& dist, int q) { return twist_expectation(dist, q, TwistKind::Particle); }

TwistResult exact_twist(const QuantumState& state, int q, TwistKind kind) {
    return twist_expectation(probabilities(state), q, kind, TwistSource::Exact);
}

Postselected postselect_half_filling(const Counts& counts) {
    if (counts.num_qubits % 2 != 0) throw InputError("postselection needs an even chain length");
    Postselected out;
    out.counts.num_qubits = counts.num_qubits;
    for (const auto& [bits, n] : counts.hist) {
        if (hamming_weight(bits) * 2 == counts.num_qubits) {
            out.counts.hist.emplace(bits, n);
        } else {
            out.rejected += n;
        }
    }
    out.empty = out.counts.empty();
    return out;
}

Distribution postselect_half_filling(const Distribution& dist) {
    if (dist.num_qubits % 2 != 0) throw InputError("postselection needs an even chain length");
    Distribution out = dist;
    for (Eigen::Index i = 0; i < dist.dimension(); ++i) {
        if (hamming_weight(static_cast<Bits>(i)) * 2 != dist.num_qubits) out.probs[i] = 0.0;
    }
    const double kept = out.probs.sum();
    if (!(kept > 0.0)) throw InvariantError("half-filling sector carries no probability");
    out.probs /= kept;
    return out;
}

} // namespace sshq

#include "sshq/noise.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sshq {

void NoiseSpec::validate() const {
    if (!(p_layer >= 0.0 && p_layer <= 1.0)) throw InputError("p_layer: must lie in [0, 1]");
    if (!(readout_flip >= 0.0 && readout_flip <= 0.5)) throw InputError("readout_flip: must lie in [0, 0.5]");
}

double effective_p_tot(double p_layer, int n_layers) {
    if (!(p_layer >= 0.0 && p_layer <= 1.0)) throw InputError("p_layer must lie in [0, 1]");
    if (n_layers < 0) throw InputError("layer count must be nonnegative");
    return 1.0 - std::pow(1.0 - p_layer, n_layers);
}

Distribution apply_depolarizing(const Distribution& dist, double p_tot) {
    if (!(p_tot >= 0.0 && p_tot <= 1.0)) throw InputError("p_tot must lie in [0, 1]");
    Distribution out = dist;
    const double floor = p_tot / static_cast<double>(dist.dimension());
    out.probs = (1.0 - p_tot) * dist.probs.array() + floor;
    return out;
}

Bits apply_readout_flip(Bits bits, int num_qubits, double q, std::mt19937_64& rng) {
    if (q <= 0.0) return bits;
    std::bernoulli_distribution flip(q);
    for (int k = 0; k < num_qubits; ++k) {
        if (flip(rng)) bits = flip_bit(bits, k, num_qubits);
    }
    return bits;
}

Counts apply_readout_flip(const Counts& counts, double q, std::mt19937_64& rng) {
    if (q <= 0.0) return counts;
    Counts out{counts.num_qubits, {}};
    for (const auto& [bits, n] : counts.hist) {
        for (std::uint64_t s = 0; s < n; ++s) out.hist[apply_readout_flip(bits, counts.num_qubits, q, rng)] += 1;
    }
    return out;
}

Distribution apply_readout_flip(const Distribution& dist, double q) {
    Distribution out = dist;
    if (q <= 0.0) return out;
    const Eigen::Index dim = dist.dimension();
    for (int k = 0; k < dist.num_qubits; ++k) {
        const Eigen::Index stride = Eigen::Index{1} << bit_position(k, dist.num_qubits);
        for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
            for (Eigen::Index i = block; i < block + stride; ++i) {
                const double p0 = out.probs[i];
                const double p1 = out.probs[i + stride];
                out.probs[i] = (1.0 - q) * p0 + q * p1;
                out.probs[i + stride] = q * p0 + (1.0 - q) * p1;
            }
        }
    }
    return out;
}

double depolarized_purity(double exact_purity, double p_tot, int n_qubits) {
    const double d = std::ldexp(1.0, n_qubits);
    return (1.0 - p_tot) * (1.0 - p_tot) * exact_purity + 2.0 * p_tot * (1.0 - p_tot) / d + p_tot * p_tot / d;
}

PTotEstimate estimate_p_tot_from_full_purity(double measured_full_purity, int L) {
    constexpr double kRangeTolerance = 1e-9;
    const double lo_purity = std::ldexp(1.0, -L);
    PTotEstimate out;
    if (measured_full_purity >= 1.0) {
        out.clamped = measured_full_purity > 1.0 + kRangeTolerance;
        out.p_tot = 0.0;
        return out;
    }
    if (measured_full_purity <= lo_purity) {
        out.clamped = measured_full_purity < lo_purity - kRangeTolerance;
        out.p_tot = 1.0;
        return out;
    }
    // depolarized_purity(1, p, L) decreases strictly from 1 to 2^-L on [0, 1].
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (depolarized_purity(1.0, mid, L) > measured_full_purity) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.p_tot = 0.5 * (lo + hi);
    return out;
}

MitigatedPurity mitigate_purity(double noisy_purity, double p_tot, int n_qubits) {
    if (!(p_tot >= 0.0 && p_tot < 1.0)) throw InputError(fmt::format("mitigation undefined for p_tot = {}", p_tot));
    const double d = std::ldexp(1.0, n_qubits);
    const double keep = 1.0 - p_tot;
    const double value = (noisy_purity - 2.0 * p_tot * keep / d - p_tot * p_tot / d) / (keep * keep);
    MitigatedPurity out{value, false};
    if (value < 1.0 / d || value > 1.0) {
        out.value = std::clamp(value, 1.0 / d, 1.0);
        out.clamped = true;
    }
    return out;
}

std::vector<std::size_t> find_valleys(const TimeSeries& series) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < series.value.size(); ++i) {
        if (series.value[i]) present.push_back(i);
    }
    std::vector<std::size_t> valleys;
    if (present.size() < 2) return valleys;
    std::vector<double> sorted;
    for (auto i : present) sorted.push_back(*series.value[i]);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    for (std::size_t k = 0; k < present.size(); ++k) {
        const double v = *series.value[present[k]];
        const bool left_ok = k == 0 || v <= *series.value[present[k - 1]];
        const bool right_ok = k + 1 == present.size() || v <= *series.value[present[k + 1]];
        if (left_ok && right_ok && v < median) valleys.push_back(present[k]);
    }
    return valleys;
}

AlignedSeries shift_align(const TimeSeries& series, ShiftMode mode) {
    if (series.value.empty() || series.t.size() != series.value.size()) throw InputError("shift_align: empty or ragged series");
    double offset = 0.0;
    if (mode == ShiftMode::ZeroAtT0) {
        auto first = std::find_if(series.value.begin(), series.value.end(), [](const auto& v) { return v.has_value(); });
        if (first == series.value.end()) throw InputError("shift_align: series has no values");
        offset = **first;
    } else {
        const auto valleys = find_valleys(series);
        if (valleys.empty()) throw InputError("shift_align: no valley minima detected");
        for (auto i : valleys) offset += *series.value[i];
        offset /= static_cast<double>(valleys.size());
    }
    AlignedSeries out{series, offset, mode};
    for (auto& v : out.series.value) {
        if (v) *v -= offset;
    }
    return out;
}

} // namespace sshq

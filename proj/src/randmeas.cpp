#include "sshq/randmeas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "sshq/noise.hpp"
#include "sshq/parallel.hpp"

namespace sshq {

Matrix2<double> sample_haar_unitary(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double r = 1.0 / std::numbers::sqrt2;
    Matrix2<double> z;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) z(i, j) = {r * normal(rng), r * normal(rng)};
    }
    // Gram-Schmidt leaves a positive real diagonal in R, which is the phase fixing that
    // makes Q Haar distributed.
    Eigen::Vector2cd q0 = z.col(0) / z.col(0).norm();
    Eigen::Vector2cd q1 = z.col(1) - q0 * q0.dot(z.col(1));
    q1 /= q1.norm();
    Matrix2<double> u;
    u << q0, q1;
    return u;
}

std::vector<Matrix2<double>> pauli_measurement_bases() {
    const double r = 1.0 / std::numbers::sqrt2;
    const Complex i{0.0, 1.0};
    Matrix2<double> id = Matrix2<double>::Identity();
    Matrix2<double> h;
    h << r, r, r, -r;
    Matrix2<double> sdg;
    sdg << 1, 0, 0, -i;
    return {id, h, h * sdg};
}

QuantumState rotate_locally(const QuantumState& state, std::span<const Matrix2<double>> unitaries) {
    if (static_cast<int>(unitaries.size()) != state.num_qubits()) throw InputError("need one local unitary per qubit");
    QuantumState out = state;
    for (int q = 0; q < state.num_qubits(); ++q) out.apply(Gate1(unitaries[static_cast<std::size_t>(q)], q, "U"));
    return out;
}

ShotTable measure_randomized(const QuantumState& state, int u_index, std::uint64_t n_shots, std::mt19937_64& rng,
                             const MeasurementOptions& options) {
    ShotTable table;
    table.u_index = u_index;
    const int L = state.num_qubits();
    Distribution dist;
    if (options.source == UnitarySource::Haar) {
        table.unitaries.reserve(static_cast<std::size_t>(L));
        for (int q = 0; q < L; ++q) table.unitaries.push_back(sample_haar_unitary(rng));
        dist = probabilities(rotate_locally(state, table.unitaries));
    } else {
        table.unitaries.assign(static_cast<std::size_t>(L), Matrix2<double>::Identity());
        dist = probabilities(state);
    }
    if (options.p_tot > 0.0) dist = apply_depolarizing(dist, options.p_tot);
    table.counts = sample_shots(dist, n_shots, rng);
    if (options.readout_flip > 0.0) table.counts = apply_readout_flip(table.counts, options.readout_flip, rng);
    return table;
}

std::vector<ShotTable> run_randomized_measurements(const QuantumState& state, int n_unitaries, std::uint64_t n_shots,
                                                   std::uint64_t master_seed, const MeasurementOptions& options) {
    if (n_unitaries < 1) throw InputError("n_unitaries must be >= 1");
    std::vector<ShotTable> tables(static_cast<std::size_t>(n_unitaries));
    parallel_for(tables.size(), options.threads, [&](std::size_t u) {
        std::mt19937_64 rng(derive_seed(master_seed, static_cast<std::uint64_t>(SeedStream::RandomizedMeasurement), options.time_index, u));
        tables[u] = measure_randomized(state, static_cast<int>(u) + 1, n_shots, rng, options);
    });
    return tables;
}

namespace {

/// q = (K (x) ... (x) K) p with K = [[1, -1/2], [-1/2, 1]].
Eigen::VectorXd apply_hamming_kernel(Eigen::VectorXd p, int n_qubits) {
    const Eigen::Index dim = p.size();
    for (int k = 0; k < n_qubits; ++k) {
        const Eigen::Index stride = Eigen::Index{1} << k;
        for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
            for (Eigen::Index i = block; i < block + stride; ++i) {
                const double a = p[i];
                const double b = p[i + stride];
                p[i] = a - 0.5 * b;
                p[i + stride] = b - 0.5 * a;
            }
        }
    }
    return p;
}

std::vector<int> checked_subset(std::span<const int> subset, int L) {
    if (subset.empty()) throw InputError("subsystem must be nonempty");
    std::vector<int> out(subset.begin(), subset.end());
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw InputError("subsystem has repeated qubits");
    if (out.front() < 0 || out.back() >= L) throw InputError(fmt::format("subsystem qubit outside chain of {} sites", L));
    return out;
}

Eigen::VectorXd marginal_counts(const Counts& counts, std::span<const int> subset) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index{1} << subset.size());
    for (const auto& [bits, n] : counts.hist) {
        out[static_cast<Eigen::Index>(extract_bits(bits, subset, counts.num_qubits))] += static_cast<double>(n);
    }
    return out;
}

PurityEstimate summarize(std::vector<double> per_unitary, std::vector<int> subset, EstimatorVariant variant) {
    PurityEstimate est;
    const auto n = static_cast<double>(per_unitary.size());
    double mean = 0.0;
    for (double v : per_unitary) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : per_unitary) var += (v - mean) * (v - mean);
    est.value = mean;
    est.std_error = per_unitary.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    est.subsystem = std::move(subset);
    est.variant = variant;
    est.per_unitary = std::move(per_unitary);
    return est;
}

} // namespace

double hamming_pair_sum(const Eigen::VectorXd& probs, int n_qubits) {
    if (probs.size() != (Eigen::Index{1} << n_qubits)) throw InputError("probability vector length is not 2^N");
    return std::ldexp(probs.dot(apply_hamming_kernel(probs, n_qubits)), n_qubits);
}

double purity_statistic(const Counts& counts, std::span<const int> subset, EstimatorVariant variant) {
    const auto sorted = checked_subset(subset, counts.num_qubits);
    const double shots = static_cast<double>(counts.total());
    if (shots < 1) throw InputError("shot table is empty");
    const int n = static_cast<int>(sorted.size());
    const Eigen::VectorXd c = marginal_counts(counts, sorted);
    const double pair_sum = hamming_pair_sum(c, n); // 2^N c^T K c
    if (variant == EstimatorVariant::PlugIn) return pair_sum / (shots * shots);
    if (shots < 2) throw InputError("unbiased estimator needs at least two shots per table");
    // Self-pairs have D = 0 and contribute 2^N each.
    return (pair_sum - std::ldexp(shots, n)) / (shots * (shots - 1.0));
}

double purity_statistic(const Distribution& dist, std::span<const int> subset) {
    const auto sorted = checked_subset(subset, dist.num_qubits);
    return hamming_pair_sum(marginal(dist, std::span<const int>(sorted)), static_cast<int>(sorted.size()));
}

PurityEstimate estimate_purity(std::span<const ShotTable> tables, std::span<const int> subset, EstimatorVariant variant) {
    if (tables.empty()) throw InputError("estimate_purity: no shot tables");
    const int L = tables.front().num_qubits();
    auto sorted = checked_subset(subset, L);
    std::vector<double> stats;
    stats.reserve(tables.size());
    for (const auto& t : tables) {
        if (t.num_qubits() != L) throw InputError("estimate_purity: tables disagree on L");
        stats.push_back(purity_statistic(t.counts, sorted, variant));
    }
    return summarize(std::move(stats), std::move(sorted), variant);
}

PurityEstimate estimate_purity(std::span<const Distribution> exact_distributions, std::span<const int> subset) {
    if (exact_distributions.empty()) throw InputError("estimate_purity: no distributions");
    const int L = exact_distributions.front().num_qubits;
    auto sorted = checked_subset(subset, L);
    std::vector<double> stats;
    for (const auto& d : exact_distributions) {
        if (d.num_qubits != L) throw InputError("estimate_purity: distributions disagree on L");
        stats.push_back(purity_statistic(d, sorted));
    }
    return summarize(std::move(stats), std::move(sorted), EstimatorVariant::Unbiased);
}

double design_averaged_purity(const QuantumState& state, std::span<const int> subset, double p_tot, double readout_flip) {
    const int L = state.num_qubits();
    const auto sorted = checked_subset(subset, L);
    const auto bases = pauli_measurement_bases();
    const std::size_t n = sorted.size();
    std::vector<Matrix2<double>> unitaries(static_cast<std::size_t>(L), Matrix2<double>::Identity());
    std::vector<int> choice(n, 0);
    double acc = 0.0;
    std::size_t settings = 0;
    while (true) {
        for (std::size_t k = 0; k < n; ++k) unitaries[static_cast<std::size_t>(sorted[k])] = bases[static_cast<std::size_t>(choice[k])];
        Distribution dist = probabilities(rotate_locally(state, unitaries));
        if (p_tot > 0.0) dist = apply_depolarizing(dist, p_tot);
        if (readout_flip > 0.0) dist = apply_readout_flip(dist, readout_flip);
        acc += purity_statistic(dist, sorted);
        ++settings;
        std::size_t k = 0;
        while (k < n && ++choice[k] == 3) choice[k++] = 0;
        if (k == n) break;
    }
    return acc / static_cast<double>(settings);
}

std::optional<double> renyi2(double purity) {
    if (!(purity > 0.0)) return std::nullopt;
    const double s = -std::log2(purity);
    return s == 0.0 ? 0.0 : s;
}

} // namespace sshq

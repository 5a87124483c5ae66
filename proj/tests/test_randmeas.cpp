#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sshq/circuit.hpp"
#include "sshq/gates.hpp"
#include "sshq/noise.hpp"
#include "sshq/parallel.hpp"
#include "sshq/randmeas.hpp"

using namespace sshq;
using doctest::Approx;

namespace {

QuantumState bell() {
    QuantumState s(2);
    s.apply(gates::h(0)).apply(gates::cx(0, 1));
    return s;
}

QuantumState neel_quench(int L, double t) {
    Circuit c = prepare_neel(L);
    c.append(evolution_circuit(t, L, Boundary::Periodic));
    return run_circuit(c, QuantumState(L));
}

QuantumState random_state(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    AmplitudeVector<double> a(Eigen::Index{1} << n);
    for (auto& x : a) x = {g(rng), g(rng)};
    a.normalize();
    return QuantumState::from_amplitudes(a);
}

// Brute-force pair sum straight from the Hamming-distance definition.
double brute_pair_sum(const Eigen::VectorXd& p, int n) {
    double acc = 0.0;
    for (Eigen::Index s = 0; s < p.size(); ++s) {
        for (Eigen::Index r = 0; r < p.size(); ++r) acc += std::pow(-2.0, -hamming_weight(static_cast<Bits>(s ^ r))) * p[s] * p[r];
    }
    return std::ldexp(acc, n);
}

} // namespace

TEST_CASE("Haar unitaries") {
    std::mt19937_64 rng(2024);
    double m2 = 0.0, m4 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto u = sample_haar_unitary(rng);
        REQUIRE((u.adjoint() * u - Matrix2<double>::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        const double a = std::norm(u(0, 0));
        m2 += a;
        m4 += a * a;
    }
    CHECK(m2 / n == Approx(0.5).epsilon(0.04));
    CHECK(std::abs(m2 / n - 0.5) < 0.02);
    CHECK(std::abs(m4 / n - 1.0 / 3.0) < 0.02);
}

TEST_CASE("Pauli bases are unitary and measure X, Y, Z") {
    const auto bases = pauli_measurement_bases();
    REQUIRE(bases.size() == 3);
    for (const auto& u : bases) CHECK((u.adjoint() * u - Matrix2<double>::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    // |+> measured after H gives 0 deterministically; |+i> after H S^dg likewise.
    QuantumState plus(1);
    plus.apply(gates::h(0));
    CHECK(probabilities(rotate_locally(plus, std::vector{bases[1]})).probs[0] == Approx(1.0));
    QuantumState plus_i(1);
    plus_i.apply(gates::h(0)).apply(gates::s(0));
    CHECK(probabilities(rotate_locally(plus_i, std::vector{bases[2]})).probs[0] == Approx(1.0));
}

TEST_CASE("run_randomized_measurements basics") {
    const auto s = neel_quench(4, 0.3);
    auto one = run_randomized_measurements(s, 1, 1, 7);
    REQUIRE(one.size() == 1);
    CHECK(one[0].total() == 1);
    CHECK(one[0].counts.hist.size() == 1);
    CHECK(one[0].u_index == 1);
    CHECK(one[0].unitaries.size() == 4);

    auto a = run_randomized_measurements(s, 5, 256, 99);
    auto b = run_randomized_measurements(s, 5, 256, 99);
    MeasurementOptions threaded;
    threaded.threads = 4;
    auto c = run_randomized_measurements(s, 5, 256, 99, threaded);
    for (std::size_t u = 0; u < a.size(); ++u) {
        CHECK(a[u].counts.hist == b[u].counts.hist);
        CHECK(a[u].counts.hist == c[u].counts.hist);
        CHECK(a[u].unitaries == c[u].unitaries);
    }
    auto d = run_randomized_measurements(s, 5, 256, 100);
    CHECK(a[0].counts.hist != d[0].counts.hist);

    MeasurementOptions identity;
    identity.source = UnitarySource::Identity;
    auto zero = run_randomized_measurements(QuantumState(3), 3, 50, 1, identity);
    for (const auto& t : zero) {
        REQUIRE(t.counts.hist.size() == 1);
        CHECK(t.counts.hist.at(0) == 50);
    }
    CHECK_THROWS_AS(run_randomized_measurements(s, 0, 10, 1), InputError);
}

TEST_CASE("seed derivation separates coordinates") {
    CHECK(derive_seed(1, 1, 0, 0) != derive_seed(1, 1, 0, 1));
    CHECK(derive_seed(1, 1, 0, 1) != derive_seed(1, 1, 1, 0));
    CHECK(derive_seed(1, 1, 0, 0) != derive_seed(1, 2, 0, 0));
    CHECK(derive_seed(1, 1, 0, 0) != derive_seed(2, 1, 0, 0));
    CHECK(derive_seed(5, 1, 2, 3) == derive_seed(5, 1, 2, 3));
}

TEST_CASE("Hamming kernel matches the brute-force pair sum") {
    for (int n = 1; n <= 5; ++n) {
        const auto d = probabilities(random_state(n, static_cast<std::uint64_t>(n)));
        CHECK(hamming_pair_sum(d.probs, n) == Approx(brute_pair_sum(d.probs, n)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(hamming_pair_sum(Eigen::VectorXd::Zero(3), 2), InputError);
}

TEST_CASE("design average is exact for pure and mixed subsystems") {
    const std::vector<int> both{0, 1}, one{0};
    CHECK(design_averaged_purity(new_basis_state(2, "10"), both) == Approx(1.0).epsilon(1e-12));
    CHECK(design_averaged_purity(bell(), one) == Approx(0.5).epsilon(1e-12));
    const auto r = random_state(5, 17);
    for (auto subset : {std::vector<int>{0, 3}, std::vector<int>{1, 2, 4}, std::vector<int>{0, 1, 2, 3, 4}}) {
        CHECK(design_averaged_purity(r, subset) == Approx(subsystem_purity(r, subset)).epsilon(1e-12));
        // Depolarizing shifts the estimate exactly as the noise model predicts.
        CHECK(design_averaged_purity(r, subset, 0.3) ==
              Approx(depolarized_purity(subsystem_purity(r, subset), 0.3, static_cast<int>(subset.size()))).epsilon(1e-12));
    }
}

TEST_CASE("estimate_purity on exact distributions") {
    std::mt19937_64 rng(4);
    const std::vector<int> both{0, 1}, one{1};
    std::vector<Distribution> pure, mixed;
    for (int u = 0; u < 100; ++u) {
        std::vector<Matrix2<double>> us{sample_haar_unitary(rng), sample_haar_unitary(rng)};
        pure.push_back(probabilities(rotate_locally(new_basis_state(2, "01"), us)));
        mixed.push_back(probabilities(rotate_locally(bell(), us)));
    }
    // Exact design average is 1; a finite Haar sample agrees within its spread.
    CHECK(std::abs(design_averaged_purity(new_basis_state(2, "01"), both) - 1.0) < 1e-10);
    auto p = estimate_purity(pure, both);
    CHECK(std::abs(p.value - 1.0) <= 3 * p.std_error);
    CHECK(p.per_unitary.size() == 100);
    auto m = estimate_purity(mixed, one);
    CHECK(std::abs(m.value - 0.5) <= 3 * m.std_error);
    CHECK(m.std_error > 0.0);
    CHECK_THROWS_AS(estimate_purity(std::span<const Distribution>{}, one), InputError);
}

TEST_CASE("plug-in and unbiased statistics") {
    Counts c{2, {{0b00, 3}, {0b11, 1}}};
    const std::vector<int> both{0, 1};
    // Hand computation: c = (3, 0, 0, 1), weights (-2)^-D.
    const double pairs = 4.0 * (9.0 + 1.0 + 2.0 * 3.0 * 0.25);
    CHECK(purity_statistic(c, both, EstimatorVariant::PlugIn) == Approx(pairs / 16.0));
    CHECK(purity_statistic(c, both, EstimatorVariant::Unbiased) == Approx((pairs - 4.0 * 4.0) / 12.0));
    Counts single{2, {{0b01, 1}}};
    CHECK_THROWS_AS(purity_statistic(single, both, EstimatorVariant::Unbiased), InputError);
    CHECK(purity_statistic(single, both, EstimatorVariant::PlugIn) == Approx(4.0));
    CHECK_THROWS_AS(purity_statistic(Counts{2, {}}, both, EstimatorVariant::PlugIn), InputError);
    const std::vector<int> bad{0, 2};
    CHECK_THROWS_AS(purity_statistic(c, bad, EstimatorVariant::PlugIn), InputError);
    const std::vector<int> dup{0, 0};
    CHECK_THROWS_AS(purity_statistic(c, dup, EstimatorVariant::PlugIn), InputError);
}

TEST_CASE("unbiased statistic has no finite-shot bias") {
    // Expected value over multinomial sampling equals the infinite-shot statistic.
    const auto d = probabilities(random_state(3, 5));
    const std::vector<int> sub{0, 2};
    const double exact = purity_statistic(d, sub);
    std::mt19937_64 rng(12);
    double sum_u = 0.0, sum_p = 0.0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        auto c = sample_shots(d, 8, rng);
        sum_u += purity_statistic(c, sub, EstimatorVariant::Unbiased);
        sum_p += purity_statistic(c, sub, EstimatorVariant::PlugIn);
    }
    CHECK(std::abs(sum_u / reps - exact) < 0.05);
    CHECK(sum_p / reps - exact > 0.1);
}

TEST_CASE("Neel L=4 at t*_N from sampled measurements") {
    const auto s = neel_quench(4, std::numbers::pi / 8);
    const auto tables = run_randomized_measurements(s, 100, 4096, 31);
    const std::vector<int> half{0, 1};
    const auto est = estimate_purity(tables, half);
    CHECK(std::abs(est.value - 0.25) < 0.05);
    const auto s2 = renyi2(est.value);
    REQUIRE(s2);
    CHECK(std::abs(*s2 - 2.0) <= 0.2);
    CHECK_THROWS_AS(estimate_purity(std::span<const ShotTable>{}, half), InputError);
}

TEST_CASE("renyi2") {
    CHECK(*renyi2(1.0) == 0.0);
    CHECK(*renyi2(0.25) == Approx(2.0));
    CHECK(*renyi2(1.0 / 16) == Approx(4.0));
    CHECK_FALSE(renyi2(0.0).has_value());
    CHECK_FALSE(renyi2(-0.01).has_value());
    CHECK_FALSE(renyi2(std::nan("")).has_value());
}

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sshq/circuit.hpp"
#include "sshq/noise.hpp"
#include "sshq/observables.hpp"

using namespace sshq;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

QuantumState quench(InitialState init, int L, double t) {
    Circuit c = prepare_initial(init, L);
    c.append(evolution_circuit(t, L, Boundary::Periodic));
    return run_circuit(c, QuantumState(L));
}

Counts single(const std::string& bits, std::uint64_t n = 1) {
    return Counts{static_cast<int>(bits.size()), {{parse_bitstring(bits), n}}};
}

} // namespace

TEST_CASE("twist of the Neel bitstring") {
    const auto z = twist_order_parameter(single("1010")).z;
    CHECK(std::abs(z - Complex(0, 1)) < 1e-12);
    const auto z8 = twist_order_parameter(single("10101010", 17)).z;
    CHECK(std::abs(z8 - Complex(0, 1)) < 1e-12);
    CHECK(twist_angle(parse_bitstring("1010"), 4, 1, TwistKind::Spin) == Approx(kPi / 2));

    const auto zn = particle_twist_amplitude(single("10101010"));
    CHECK(std::abs(zn.z - 1.0) < 1e-12);
    CHECK(zn.berry().gamma == Approx(0.0));
    CHECK(zn.q == 2);
    CHECK(zn.kind == TwistKind::Particle);
}

TEST_CASE("twist peak values") {
    const auto z8 = exact_twist(run_circuit(prepare_singlet_product(8), QuantumState(8)), 1, TwistKind::Spin).z;
    CHECK(z8.real() == Approx(std::pow(std::cos(kPi / 8), 4)).epsilon(1e-12));
    CHECK(z8.real() == Approx(0.72857).epsilon(1e-5));
    const double peak16 = std::pow(std::cos(kPi / 16), 8);
    CHECK(exact_twist(quench(InitialState::Neel, 16, kPi / 8), 1, TwistKind::Spin).z.real() == Approx(-peak16).epsilon(1e-12));
    CHECK(exact_twist(quench(InitialState::Singlet, 16, kPi / 2), 1, TwistKind::Spin).z.real() == Approx(peak16).epsilon(1e-12));
}

TEST_CASE("Neel twist is periodic up to conjugation") {
    for (double t : {0.05, 0.3, 0.61}) {
        const auto a = exact_twist(quench(InitialState::Neel, 8, t), 1, TwistKind::Spin).z;
        const auto b = exact_twist(quench(InitialState::Neel, 8, t + kPi / 4), 1, TwistKind::Spin).z;
        const auto c = exact_twist(quench(InitialState::Neel, 8, t + kPi / 2), 1, TwistKind::Spin).z;
        CHECK(std::abs(b - std::conj(a)) < 1e-12);
        CHECK(std::abs(c - a) < 1e-12);
    }
}

TEST_CASE("exact twist matches the distribution path") {
    for (double t : {0.0, 0.2, 0.9}) {
        const auto s = quench(InitialState::Singlet, 8, t);
        const auto d = probabilities(s);
        CHECK(std::abs(exact_twist(s, 1, TwistKind::Spin).z - twist_order_parameter(d).z) < 1e-12);
        CHECK(std::abs(exact_twist(s, 2, TwistKind::Particle).z - particle_twist_amplitude(d).z) < 1e-12);
    }
    for (Bits b = 0; b < 64; ++b) {
        CHECK(std::abs(exact_twist(QuantumState(6, b), 1, TwistKind::Spin).z) == Approx(1.0));
        CHECK(std::abs(exact_twist(QuantumState(6, b), 3, TwistKind::Particle).z) == Approx(1.0));
    }
}

TEST_CASE("empty counts are rejected") {
    CHECK_THROWS_AS(twist_order_parameter(Counts{4, {}}), InputError);
    CHECK_THROWS_AS(particle_twist_amplitude(Counts{4, {}}), InputError);
}

TEST_CASE("Berry phase branch and reliability") {
    CHECK(berry_phase(Complex(1, 0)).gamma == 0.0);
    CHECK(berry_phase(Complex(-1, 0)).gamma == Approx(kPi));
    CHECK(berry_phase(Complex(-1, -0.0)).gamma == Approx(kPi));
    CHECK(berry_phase(Complex(0, 1)).gamma == Approx(kPi / 2));
    CHECK(berry_phase(Complex(0, -1)).gamma == Approx(-kPi / 2));
    CHECK(berry_phase(Complex(1, 0)).reliable);
    CHECK_FALSE(berry_phase(Complex(5e-4, 0)).reliable);
    TwistResult r;
    r.z = Complex(0, 1);
    r.q = 2;
    r.L = 8;
    CHECK(r.position() == Approx(8 * (kPi / 2) / (2 * kPi * 2)));
    CHECK(r.polarization() == Approx(-0.25));
}

TEST_CASE("Neel Berry phase flips across t*_N; singlet stays on pi") {
    const double ts = kPi / 8;
    for (double eps : {1e-3, 2e-2}) {
        const double before = exact_twist(quench(InitialState::Neel, 8, ts - eps), 2, TwistKind::Particle).berry().gamma;
        const double after = exact_twist(quench(InitialState::Neel, 8, ts + eps), 2, TwistKind::Particle).berry().gamma;
        CHECK(before > 0);
        CHECK(after < 0);
        CHECK(before == Approx(kPi).epsilon(0.1));
    }
    // The paper formula puts the singlet phase on the pi branch at every t.
    for (double t : {0.0, 0.3, 0.7, 1.2}) {
        const auto g = exact_twist(quench(InitialState::Singlet, 8, t), 2, TwistKind::Particle).berry();
        CHECK(g.gamma == Approx(kPi).epsilon(1e-9));
    }
}

TEST_CASE("postselection keeps half filling") {
    Counts c{4, {{parse_bitstring("0101"), 10}, {parse_bitstring("0011"), 5}, {parse_bitstring("0001"), 7}}};
    const auto p = postselect_half_filling(c);
    CHECK(p.counts.total() == 15);
    CHECK(p.rejected == 7);
    CHECK_FALSE(p.empty);
    CHECK(p.counts.hist.count(parse_bitstring("0001")) == 0);

    const auto none = postselect_half_filling(single("0001", 3));
    CHECK(none.empty);
    CHECK(none.rejected == 3);
    CHECK_THROWS_AS(postselect_half_filling(single("001")), InputError);

    const auto d = probabilities(quench(InitialState::Neel, 8, 0.37));
    std::mt19937_64 rng(3);
    const auto shots = sample_shots(d, 2000, rng);
    const auto kept = postselect_half_filling(shots);
    CHECK(kept.rejected == 0);
    CHECK(kept.counts.hist == shots.hist);
    CHECK((postselect_half_filling(d).probs - d.probs).cwiseAbs().maxCoeff() < 1e-12);

    Distribution off{2, Eigen::Vector4d(1, 0, 0, 0)};
    CHECK_THROWS_AS(postselect_half_filling(off), InvariantError);
}

TEST_CASE("postselection brings noisy twist data closer to exact") {
    std::mt19937_64 rng(77);
    double raw_sq = 0.0, post_sq = 0.0;
    for (int i = 0; i < 24; ++i) {
        const double t = kPi / 2 * i / 23.0;
        const auto d = probabilities(quench(InitialState::Neel, 8, t));
        const auto exact = twist_order_parameter(d).z;
        const auto noisy = apply_readout_flip(sample_shots(d, 4096, rng), 0.02, rng);
        raw_sq += std::norm(twist_order_parameter(noisy).z - exact);
        post_sq += std::norm(twist_order_parameter(postselect_half_filling(noisy).counts, 1, TwistSource::Postselected).z - exact);
    }
    CHECK(std::sqrt(post_sq) < std::sqrt(raw_sq));
}

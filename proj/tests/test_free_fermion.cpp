#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "sshq/circuit.hpp"
#include "sshq/free_fermion.hpp"

using namespace sshq;
using namespace sshq::ff;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I{0.0, 1.0};

std::vector<double> grid(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
    return out;
}

double exact_block_entropy(InitialState init, int L, Boundary b, double t, const std::vector<int>& sites) {
    Circuit c = prepare_initial(init, L);
    c.append(evolution_circuit(t, L, b));
    return -std::log2(subsystem_purity(run_circuit(c, QuantumState(L)), sites));
}

} // namespace

TEST_CASE("band energies") {
    auto crit = band_energy(kPi, {1.0, 1.0});
    CHECK(std::abs(crit.lower) < 1e-7);
    CHECK(std::abs(crit.upper) < 1e-7);
    for (double k : grid(-kPi, kPi, 13)) {
        auto flat = band_energy(k, {0.0, 1.0});
        CHECK(flat.lower == Approx(-2.0));
        CHECK(flat.upper == Approx(2.0));
        // Gap 4|J - J'| at k = pi.
        auto e = band_energy(k, {0.3, 0.8});
        CHECK(e.upper == Approx(-e.lower));
        CHECK(e.upper - e.lower >= 4 * 0.5 - 1e-12);
        CHECK(bloch_vector(k, {0.3, 0.8}).magnitude() == Approx(e.upper));
    }
    auto mirror = band_energy(0.0, {1.0, 0.0});
    CHECK(mirror.lower == Approx(-2.0));
    CHECK(mirror.upper == Approx(2.0));
    CHECK(band_energy(kPi, {0.3, 0.8}).upper - band_energy(kPi, {0.3, 0.8}).lower == Approx(4 * 0.5));
}

TEST_CASE("flat-band guard") {
    CHECK_NOTHROW(require_flat_band({0.0, 1.0}));
    CHECK_NOTHROW(require_flat_band({1.0, 0.0}));
    CHECK_THROWS_AS(require_flat_band({0.5, 1.0}), InputError);
    CHECK_THROWS_AS(chain_correlation_matrix(InitialState::Neel, 0.1, 8, Boundary::Open, {0.5, 1.0}), InputError);
}

TEST_CASE("Neel Wannier state") {
    const SiteLabel a{Sublattice::A, 3}, b{Sublattice::B, 2};
    auto w0 = wannier_neel(3, 0.0);
    CHECK(std::norm(w0.coefficient(a)) == Approx(1.0));
    CHECK(std::norm(w0.coefficient(b)) == Approx(0.0));
    auto w1 = wannier_neel(3, kPi / 8);
    CHECK(std::norm(w1.coefficient(a)) == Approx(0.5));
    CHECK(std::norm(w1.coefficient(b)) == Approx(0.5));
    auto w2 = wannier_neel(3, kPi / 4);
    CHECK(std::norm(w2.coefficient(b)) == Approx(1.0));
    CHECK(std::abs(w2.coefficient(b) + I) < 1e-15);
}

TEST_CASE("singlet Wannier state") {
    const int m = 5;
    auto w0 = wannier_singlet(m, 0.0);
    CHECK(std::norm(w0.coefficient({Sublattice::A, m})) == Approx(0.5));
    CHECK(std::norm(w0.coefficient({Sublattice::B, m})) == Approx(0.5));
    CHECK(std::real(w0.coefficient({Sublattice::A, m}) * std::conj(w0.coefficient({Sublattice::B, m}))) == Approx(-0.5));
    auto w1 = wannier_singlet(m, kPi / 4);
    CHECK(std::norm(w1.coefficient({Sublattice::A, m + 1})) == Approx(0.5));
    CHECK(std::norm(w1.coefficient({Sublattice::B, m - 1})) == Approx(0.5));
    CHECK(std::norm(w1.coefficient({Sublattice::A, m})) < 1e-30);
    CHECK(std::norm(w1.coefficient({Sublattice::B, m})) < 1e-30);
    for (double t : grid(0.0, kPi, 37)) {
        CHECK(wannier_singlet(m, t).norm_squared() == Approx(1.0).epsilon(1e-14));
        CHECK(wannier_neel(m, t).norm_squared() == Approx(1.0).epsilon(1e-14));
        // Orbitals on different cells are orthogonal.
        CHECK(std::abs(inner_product(wannier_singlet(m, t), wannier_singlet(m + 1, t))) < 1e-15);
        CHECK(std::abs(inner_product(wannier_neel(m, t), wannier_neel(m + 1, t))) < 1e-15);
    }
}

TEST_CASE("correlation submatrices match the Appendix after conjugation") {
    for (double t : grid(0.0, kPi, 41)) {
        const double s = std::sin(2 * t), c = std::cos(2 * t);
        Eigen::Matrix3cd appendix;
        appendix << s * s, -I * s * c, I * s * c, I * s * c, c * c, -c * c, -I * s * c, -c * c, 1.0;
        appendix /= 2.0;
        const auto sub = correlation_submatrix(InitialState::Singlet, t);
        REQUIRE(sub.rows() == 3);
        CHECK((sub - appendix.conjugate()).cwiseAbs().maxCoeff() < 1e-15);
        auto ev = hermitian_eigenvalues(sub);
        CHECK(std::abs(ev[0]) < 1e-14);
        CHECK(std::abs(ev[1] - (1 - std::abs(c)) / 2) < 1e-14);
        CHECK(std::abs(ev[2] - (1 + std::abs(c)) / 2) < 1e-14);

        const auto neel = correlation_submatrix(InitialState::Neel, t);
        REQUIRE(neel.rows() == 1);
        CHECK(neel(0, 0).real() == Approx(s * s));

        Eigen::Matrix2cd neel_appendix;
        neel_appendix << s * s, -I * s * c, I * s * c, c * c;
        const auto w = wannier_neel(0, t);
        const std::vector<SiteLabel> order{{Sublattice::B, -1}, {Sublattice::A, 0}};
        CHECK((wannier_correlation(std::span(&w, 1), order) - neel_appendix.conjugate()).cwiseAbs().maxCoeff() < 1e-15);
        const auto interior = interior_correlation(InitialState::Neel, t);
        for (auto init : {InitialState::Neel, InitialState::Singlet}) {
            auto e = hermitian_eigenvalues(interior_correlation(init, t));
            CHECK(std::abs(e[e.size() - 1] - 1.0) < 1e-14);
            for (Eigen::Index k = 0; k + 1 < e.size(); ++k) CHECK(std::abs(e[k]) < 1e-14);
            CHECK(renyi_from_correlation(e) == Approx(0.0).epsilon(1e-12));
        }
    }
    auto ev = hermitian_eigenvalues(correlation_submatrix(InitialState::Singlet, kPi / 4));
    CHECK(std::abs(ev[0]) < 1e-15);
    CHECK(ev[1] == Approx(0.5));
    CHECK(ev[2] == Approx(0.5));
}

TEST_CASE("closed-form eigenvalues agree with the iterative solver") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::MatrixXcd a(n, n);
            for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {g(rng), g(rng)};
            Eigen::MatrixXcd h = a + a.adjoint();
            // Force degenerate spectra on some trials.
            if (trial % 3 == 0 && n == 3) {
                Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
                Eigen::MatrixXcd q = qr.householderQ();
                Eigen::Vector3d d(0.25, 0.25, -1.0);
                h = q * d.cast<Complex>().asDiagonal() * q.adjoint();
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
            CHECK((hermitian_eigenvalues(h) - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("renyi_from_correlation") {
    CHECK(renyi_from_correlation(std::vector<double>{0.0, 1.0}) == Approx(0.0));
    CHECK(renyi_from_correlation(std::vector<double>{0.5}) == Approx(1.0));
    CHECK(renyi_from_correlation(std::vector<double>{0.5, 0.5}) == Approx(2.0));
    CHECK(renyi_from_correlation(std::vector<double>{0.5}, 3.0) == Approx(1.0));
    CHECK_THROWS_AS(renyi_from_correlation(std::vector<double>{0.5}, 1.0), InputError);
    CHECK(renyi_from_correlation(std::vector<double>{1.0 + 5e-9, -5e-9}) == Approx(0.0));
    CHECK_THROWS_AS(renyi_from_correlation(std::vector<double>{1.1}), InvariantError);
    CHECK_THROWS_AS(renyi_from_correlation(std::vector<double>{-1e-6}), InvariantError);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    CHECK(renyi2_from_correlation(c) == Approx(2.0));
}

TEST_CASE("closed forms") {
    CHECK(entropy_neel_pbc(kPi / 8) == Approx(2.0));
    CHECK(entropy_singlet_pbc(kPi / 4) == Approx(4.0));
    CHECK(closed_form_entropy(InitialState::Neel, kPi / 8, Boundary::Open) == Approx(1.0));
    CHECK(closed_form_entropy(InitialState::Singlet, kPi / 4, Boundary::Periodic) == Approx(4.0));
    CHECK(closed_form_entropy(InitialState::Singlet, kPi / 4, Boundary::Periodic, 4) == Approx(0.0));
    CHECK(closed_form_entropy(InitialState::Singlet, kPi / 8, Boundary::Periodic, 4) == Approx(2.0));
    CHECK(closed_form_entropy(InitialState::Singlet, kPi / 4, Boundary::Open, 4) == Approx(2.0));
    CHECK_THROWS_AS(closed_form_entropy(InitialState::Neel, 0.1, Boundary::Open, 6), InputError);
    for (double t : grid(0.0, kPi, 100)) {
        CHECK(std::abs(entropy_singlet_pbc(t) - 2 * entropy_neel_pbc(t / 2)) <= 1e-12);
        // Period pi/4 for the Neel curve.
        CHECK(std::abs(entropy_neel_pbc(t) - entropy_neel_pbc(t + kPi / 4)) <= 1e-12);
        const double cuts = 2.0;
        const double sub = cuts * renyi_from_correlation(hermitian_eigenvalues(correlation_submatrix(InitialState::Singlet, t)));
        CHECK(std::abs(sub - entropy_singlet_pbc(t)) <= 1e-10);
    }
}

TEST_CASE("chain correlation matrix matches exact statevector entropies") {
    for (int L : {4, 6, 8}) {
        for (auto init : {InitialState::Neel, InitialState::Singlet}) {
            for (auto b : {Boundary::Periodic, Boundary::Open}) {
                for (double t : {0.0, 0.21, 0.6, 1.3}) {
                    const auto c = chain_correlation_matrix(init, t, L, b);
                    CHECK((c - c.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
                    CHECK(c.trace().real() == Approx(L / 2.0));
                    for (int start = 0; start < L; ++start) {
                        for (int len = 1; start + len <= L && len < L; ++len) {
                            std::vector<int> sites(static_cast<std::size_t>(len));
                            std::iota(sites.begin(), sites.end(), start);
                            const double ff = block_renyi_entropy(c, sites);
                            CHECK(std::abs(ff - exact_block_entropy(init, L, b, t, sites)) < 1e-10);
                        }
                    }
                }
            }
        }
    }
    CHECK_THROWS_AS(chain_correlation_matrix(InitialState::Neel, 0.1, 5, Boundary::Open), InputError);
}

#pragma once

// Exact free-fermion reference for the flat-band SSH quench: Bloch bands, time-dependent
// Wannier states, correlation matrices and second-order Renyi entropies.

#include <complex>
#include <compare>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sshq/circuit.hpp"

namespace sshq::ff {

/// Intracell (J) and intercell (J') couplings; hopping amplitudes are 2J and 2J'.
struct Couplings {
    double J = 0.0;
    double Jp = 1.0;
};

/// Throws InputError unless (J, J') is one of the fully dimerized limits (0, 1) or (1, 0).
void require_flat_band(const Couplings& c);

struct BlochVector {
    double k = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double magnitude() const;
};

BlochVector bloch_vector(double k, const Couplings& c);

struct BandEnergies {
    double lower = 0.0;
    double upper = 0.0;
};

/// E_{+-} = +-2 sqrt(J^2 + 2 J J' cos k + J'^2).
BandEnergies band_energy(double k, const Couplings& c);

enum class Sublattice { A, B };

struct SiteLabel {
    Sublattice sublattice;
    int cell;

    auto operator<=>(const SiteLabel&) const = default;
};

/// Single-particle state localized around unit cell `cell` at time t.
struct WannierState {
    int cell = 0;
    double t = 0.0;
    std::map<SiteLabel, std::complex<double>> coefficients;

    double norm_squared() const;
    std::complex<double> coefficient(SiteLabel site) const;
};

std::complex<double> inner_product(const WannierState& a, const WannierState& b);

/// cos(2t) a_m^dag - i sin(2t) b_{m-1}^dag, the post-quench orbital of the Neel state.
WannierState wannier_neel(int m, double t);
/// (1/sqrt2){cos(2t)[a_m - b_m] + i sin(2t)[a_{m+1} - b_{m-1}]}, from the intracell singlet.
WannierState wannier_singlet(int m, double t);
WannierState wannier_state(InitialState initial, int m, double t);

/// C_ij = <c_i^dag c_j> = sum_w conj(w_i) w_j restricted to `sites`.
Eigen::MatrixXcd wannier_correlation(std::span<const WannierState> states, std::span<const SiteLabel> sites);

/// Correlation submatrix on the left side of a single cut between unit cells.
///
/// Neel: 1x1 matrix <b_{m-1}^dag b_{m-1}> = sin^2(2t).
/// Singlet: 3x3 matrix over (b_{m-1}, a_m, b_m) from the two orbitals w(m), w(m+1) that
/// straddle the cut between cells m and m+1; eigenvalues 0 and (1 -+ cos 2t)/2.
Eigen::MatrixXcd correlation_submatrix(InitialState initial, double t);

/// Correlation matrix of one orbital over its full support (the cut lies outside it).
Eigen::MatrixXcd interior_correlation(InitialState initial, double t);

/// Eigenvalues of a Hermitian matrix up to 3x3 from the characteristic polynomial,
/// ascending. Larger matrices go through Eigen's self-adjoint solver.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);

/// Clamping window applied to correlation eigenvalues before taking logarithms.
inline constexpr double kEigenvalueClampTolerance = 1e-8;

/// S^(alpha) = 1/(1-alpha) sum log2[(1-xi)^alpha + xi^alpha], in bits.
double renyi_from_correlation(std::span<const double> eigenvalues, double alpha = 2.0);
double renyi_from_correlation(const Eigen::VectorXd& eigenvalues, double alpha = 2.0);
/// alpha = 2 directly from the matrix, -log2 det[C^2 + (1 - C)^2]. Avoids the
/// sqrt(eps) loss of the closed-form cubic near degenerate eigenvalues.
double renyi2_from_correlation(const Eigen::MatrixXcd& c);

/// Half-chain second-order Renyi entropy after the flat-band quench, in bits.
///
/// PBC: Neel and L = 4 singlet: -2 log2[1 - sin^2(4t)/2]; singlet with L >= 8:
/// -4 log2[1 - sin^2(2t)/2]. OBC (one cut): half of the generic expression, including L = 4.
double closed_form_entropy(InitialState initial, double t, Boundary boundary, int L = 0);

/// S^{0->1}(t) = -2 log2[1 - sin^2(4t)/2].
double entropy_neel_pbc(double t);
/// S^{0->2}(t) = -4 log2[1 - sin^2(2t)/2].
double entropy_singlet_pbc(double t);

/// Full L x L site-basis correlation matrix of the quenched chain (site j -> index j-1).
/// Particles sit where the spin bit is 0. Only flat-band couplings are accepted.
Eigen::MatrixXcd chain_correlation_matrix(InitialState initial, double t, int L, Boundary boundary, const Couplings& c = {});

/// Renyi entropy of a block of 0-based sites from a chain correlation matrix.
double block_renyi_entropy(const Eigen::MatrixXcd& chain_correlation, std::span<const int> sites, double alpha = 2.0);

} // namespace sshq::ff

#include "sshq/free_fermion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace sshq::ff {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

} // namespace

void require_flat_band(const Couplings& c) {
    const bool topological = c.J == 0.0 && c.Jp == 1.0;
    const bool trivial = c.J == 1.0 && c.Jp == 0.0;
    if (!topological && !trivial) {
        throw InputError(fmt::format("free-fermion oracle supports only flat-band couplings (0,1) or (1,0), got ({}, {})", c.J, c.Jp));
    }
}

double BlochVector::magnitude() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_vector(double k, const Couplings& c) {
    return {k, 2 * c.J + 2 * c.Jp * std::cos(k), 2 * c.Jp * std::sin(k), 0.0};
}

BandEnergies band_energy(double k, const Couplings& c) {
    const double radicand = c.J * c.J + 2 * c.J * c.Jp * std::cos(k) + c.Jp * c.Jp;
    const double e = 2 * std::sqrt(std::max(radicand, 0.0));
    return {-e, e};
}

double WannierState::norm_squared() const {
    double acc = 0.0;
    for (const auto& [site, amp] : coefficients) acc += std::norm(amp);
    return acc;
}

std::complex<double> WannierState::coefficient(SiteLabel site) const {
    auto it = coefficients.find(site);
    return it == coefficients.end() ? std::complex<double>{} : it->second;
}

std::complex<double> inner_product(const WannierState& a, const WannierState& b) {
    std::complex<double> acc{};
    for (const auto& [site, amp] : a.coefficients) acc += std::conj(amp) * b.coefficient(site);
    return acc;
}

WannierState wannier_neel(int m, double t) {
    const double phase = 2.0 * t; // d_k t with d_k = 2
    WannierState w{m, t, {}};
    w.coefficients[{Sublattice::A, m}] = std::cos(phase);
    w.coefficients[{Sublattice::B, m - 1}] = -kI * std::sin(phase);
    return w;
}

WannierState wannier_singlet(int m, double t) {
    const double phase = 2.0 * t;
    const double r = 1.0 / std::numbers::sqrt2;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    WannierState w{m, t, {}};
    w.coefficients[{Sublattice::A, m}] = r * c;
    w.coefficients[{Sublattice::B, m}] = -r * c;
    w.coefficients[{Sublattice::A, m + 1}] = kI * (r * s);
    w.coefficients[{Sublattice::B, m - 1}] = -kI * (r * s);
    return w;
}

WannierState wannier_state(InitialState initial, int m, double t) {
    return initial == InitialState::Neel ? wannier_neel(m, t) : wannier_singlet(m, t);
}

Eigen::MatrixXcd wannier_correlation(std::span<const WannierState> states, std::span<const SiteLabel> sites) {
    const auto n = static_cast<Eigen::Index>(sites.size());
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& w : states) {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = w.coefficient(sites[static_cast<std::size_t>(i)]);
        c += v.conjugate() * v.transpose();
    }
    return c;
}

Eigen::MatrixXcd correlation_submatrix(InitialState initial, double t) {
    constexpr int m = 0;
    if (initial == InitialState::Neel) {
        const WannierState w = wannier_neel(m, t);
        const SiteLabel sites[] = {{Sublattice::B, m - 1}};
        return wannier_correlation(std::span(&w, 1), sites);
    }
    const WannierState ws[] = {wannier_singlet(m, t), wannier_singlet(m + 1, t)};
    const SiteLabel sites[] = {{Sublattice::B, m - 1}, {Sublattice::A, m}, {Sublattice::B, m}};
    return wannier_correlation(ws, sites);
}

Eigen::MatrixXcd interior_correlation(InitialState initial, double t) {
    const WannierState w = wannier_state(initial, 0, t);
    std::vector<SiteLabel> sites;
    for (const auto& [site, amp] : w.coefficients) sites.push_back(site);
    return wannier_correlation(std::span(&w, 1), sites);
}

namespace {

Eigen::Vector3cd cross(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// The trigonometric cubic loses ~sqrt(eps) when two roots nearly coincide. Take the
/// eigenvector of the best-separated root, refine that root by its Rayleigh quotient,
/// and solve the remaining 2x2 block on the orthogonal complement.
Eigen::VectorXd deflate_3x3(const Eigen::MatrixXcd& m, Eigen::VectorXd trig) {
    const int iso = (trig[1] - trig[0] < trig[2] - trig[1]) ? 2 : 0;
    const Eigen::Matrix3cd a = m - trig[iso] * Eigen::Matrix3cd::Identity();
    Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
        const Eigen::Vector3cd c = cross(a.row(i).transpose(), a.row(j).transpose());
        if (c.squaredNorm() > v.squaredNorm()) v = c;
    }
    if (v.squaredNorm() < 1e-200) return trig;
    v.normalize();
    Eigen::Index k = 0;
    v.cwiseAbs().minCoeff(&k);
    Eigen::Vector3cd u1 = Eigen::Vector3cd::Unit(k) - v * std::conj(v[k]);
    u1.normalize();
    const Eigen::Vector3cd u2 = cross(v, u1).conjugate().normalized();
    const std::complex<double> b00 = u1.dot(m * u1);
    const std::complex<double> b11 = u2.dot(m * u2);
    const std::complex<double> b01 = u1.dot(m * u2);
    const double mean = 0.5 * (b00.real() + b11.real());
    const double radius = std::hypot(0.5 * (b00.real() - b11.real()), std::abs(b01));
    Eigen::VectorXd out(3);
    out << v.dot(m * v).real(), mean - radius, mean + radius;
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    const auto n = m.rows();
    if (m.cols() != n) throw InputError("eigenvalues of a non-square matrix");
    Eigen::VectorXd out(n);
    if (n == 0) return out;
    if (n == 1) {
        out[0] = m(0, 0).real();
        return out;
    }
    if (n == 2) {
        const double a = m(0, 0).real();
        const double d = m(1, 1).real();
        const double mean = 0.5 * (a + d);
        const double radius = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
        out << mean - radius, mean + radius;
        return out;
    }
    if (n == 3) {
        // Trigonometric solution of the characteristic cubic.
        const double off = std::norm(m(0, 1)) + std::norm(m(0, 2)) + std::norm(m(1, 2));
        const double q = m.trace().real() / 3.0;
        if (off == 0.0) {
            out << m(0, 0).real(), m(1, 1).real(), m(2, 2).real();
            std::sort(out.begin(), out.end());
            return out;
        }
        const double p2 = std::pow(m(0, 0).real() - q, 2) + std::pow(m(1, 1).real() - q, 2) + std::pow(m(2, 2).real() - q, 2) + 2.0 * off;
        const double p = std::sqrt(p2 / 6.0);
        const Eigen::Matrix3cd b = (m - q * Eigen::MatrixXcd::Identity(3, 3)) / p;
        const double r = std::clamp(0.5 * b.determinant().real(), -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        const double hi = q + 2.0 * p * std::cos(phi);
        const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        out << lo, 3.0 * q - hi - lo, hi;
        return deflate_3x3(m, out);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double renyi_from_correlation(std::span<const double> eigenvalues, double alpha) {
    if (!(alpha > 0.0) || alpha == 1.0) throw InputError("Renyi order must be positive and != 1");
    double acc = 0.0;
    for (double xi : eigenvalues) {
        if (xi < -kEigenvalueClampTolerance || xi > 1.0 + kEigenvalueClampTolerance) {
            throw InvariantError(fmt::format("correlation eigenvalue {} outside [0, 1]", xi));
        }
        xi = std::clamp(xi, 0.0, 1.0);
        if (alpha == 2.0) {
            acc += std::log2(1.0 - 2.0 * xi * (1.0 - xi));
        } else {
            acc += std::log2(std::pow(1.0 - xi, alpha) + std::pow(xi, alpha));
        }
    }
    // Exact zeros come out as -0.0 otherwise.
    return acc == 0.0 ? 0.0 : acc / (1.0 - alpha);
}

double renyi_from_correlation(const Eigen::VectorXd& eigenvalues, double alpha) {
    return renyi_from_correlation(std::span<const double>(eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())), alpha);
}

double renyi2_from_correlation(const Eigen::MatrixXcd& c) {
    if (c.rows() != c.cols()) throw InputError("correlation matrix must be square");
    if (c.rows() == 0) return 0.0;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(c.rows(), c.cols());
    // prod_l [xi^2 + (1 - xi)^2] = det[C^2 + (1 - C)^2]
    const double purity = (id - 2.0 * c + 2.0 * c * c).determinant().real();
    if (!(purity > 0.0)) throw InvariantError("correlation matrix has eigenvalues outside [0, 1]");
    const double s = -std::log2(purity);
    return s > 0.0 ? s : 0.0;
}

double entropy_neel_pbc(double t) {
    const double s = std::sin(4.0 * t);
    return -2.0 * std::log2(1.0 - 0.5 * s * s);
}

double entropy_singlet_pbc(double t) {
    const double s = std::sin(2.0 * t);
    return -4.0 * std::log2(1.0 - 0.5 * s * s);
}

double closed_form_entropy(InitialState initial, double t, Boundary boundary, int L) {
    if (L != 0 && (L < 4 || L % 4 != 0)) throw InputError(fmt::format("symmetric bipartition needs L = 4*l, got {}", L));
    // With two cells the periodic wrap couples the cut pair back onto itself; open chains keep the generic form.
    const bool two_cells = (L == 4 && boundary == Boundary::Periodic);
    const double pbc = (initial == InitialState::Neel || two_cells) ? entropy_neel_pbc(t) : entropy_singlet_pbc(t);
    return boundary == Boundary::Periodic ? pbc : 0.5 * pbc;
}

Eigen::MatrixXcd chain_correlation_matrix(InitialState initial, double t, int L, Boundary boundary, const Couplings& c) {
    require_flat_band(c);
    if (L < 2 || L % 2 != 0) throw InputError(fmt::format("chain length must be even, got {}", L));
    const int particles = L / 2;
    Eigen::MatrixXcd orbitals = Eigen::MatrixXcd::Zero(L, particles);
    for (int j = 0; j < particles; ++j) {
        if (initial == InitialState::Neel) {
            // "10" on each intracell pair: the particle (bit 0) sits on the second site.
            orbitals(2 * j + 1, j) = 1.0;
        } else {
            orbitals(2 * j, j) = 1.0 / std::numbers::sqrt2;
            orbitals(2 * j + 1, j) = -1.0 / std::numbers::sqrt2;
        }
    }
    std::vector<std::pair<int, int>> links;
    if (c.Jp == 1.0) {
        links = evolution_links(L, boundary);
    } else {
        for (int q = 0; q < L; q += 2) links.emplace_back(q, q + 1);
    }
    const double cs = std::cos(2.0 * t);
    const double sn = std::sin(2.0 * t);
    // Jordan-Wigner string of the wrap-around link: the hop passes the other N - 1
    // particles, so the fermionic boundary hopping carries (-1)^(N-1).
    const double boundary_sign = (particles - 1) % 2 ? -1.0 : 1.0;
    for (const auto& [a, b] : links) {
        const Eigen::RowVectorXcd ra = orbitals.row(a);
        const Eigen::RowVectorXcd rb = orbitals.row(b);
        const double sg = (b == 0 && a == L - 1) ? boundary_sign : 1.0;
        orbitals.row(a) = cs * ra - kI * sg * sn * rb;
        orbitals.row(b) = cs * rb - kI * sg * sn * ra;
    }
    return orbitals.conjugate() * orbitals.transpose();
}

double block_renyi_entropy(const Eigen::MatrixXcd& chain_correlation, std::span<const int> sites, double alpha) {
    const auto n = static_cast<Eigen::Index>(sites.size());
    Eigen::MatrixXcd block(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) block(i, j) = chain_correlation(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]);
    }
    if (alpha == 2.0) return renyi2_from_correlation(block);
    return renyi_from_correlation(hermitian_eigenvalues(block), alpha);
}

} // namespace sshq::ff

#pragma once

// Dense statevector engine. Everything here is templated on the real scalar type;
// the rest of the library works with the `double` aliases at the bottom.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sshq/bits.hpp"
#include "sshq/errors.hpp"

namespace sshq {

inline constexpr int kMaxReducedQubits = 12;

template <typename Real>
using AmplitudeVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using Matrix2 = Eigen::Matrix<std::complex<Real>, 2, 2>;
template <typename Real>
using Matrix4 = Eigen::Matrix<std::complex<Real>, 4, 4>;
template <typename Real>
using DenseMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol) {
    const auto n = m.rows();
    using Scalar = typename Derived::Scalar;
    auto err = (m.adjoint() * m - Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n))
                   .cwiseAbs()
                   .maxCoeff();
    return static_cast<double>(err) <= tol;
}

inline void check_capacity(int num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw CapacityError("qubit count " + std::to_string(num_qubits) + " outside supported range [1, 24]");
    }
}

} // namespace detail

/// Unitary tolerance enforced when a gate is constructed (double precision).
inline constexpr double kUnitaryTolerance = 1e-12;

template <typename Real>
constexpr double unitary_tolerance() {
    return std::max(kUnitaryTolerance, 64.0 * static_cast<double>(std::numeric_limits<Real>::epsilon()));
}

/// Single-qubit gate: 2x2 unitary acting on `target`.
template <typename Real>
class BasicGate1 {
  public:
    BasicGate1(Matrix2<Real> matrix, int target, std::string name = "U1", std::optional<Real> param = {})
        : matrix_(std::move(matrix)), target_(target), name_(std::move(name)), param_(param) {
        if (target_ < 0) throw InputError("gate target must be nonnegative");
        if (!detail::is_unitary(matrix_, unitary_tolerance<Real>())) throw InvariantError("non-unitary single-qubit gate " + name_);
    }

    const Matrix2<Real>& matrix() const { return matrix_; }
    int target() const { return target_; }
    const std::string& name() const { return name_; }
    std::optional<Real> param() const { return param_; }
    BasicGate1 adjoint() const { return BasicGate1(matrix_.adjoint(), target_, name_ + "_dg", param_); }

  private:
    Matrix2<Real> matrix_;
    int target_;
    std::string name_;
    std::optional<Real> param_;
};

/// Two-qubit gate: 4x4 unitary on the ordered pair (first, second). In the 4x4 basis
/// |ab>, `first` supplies the high bit.
template <typename Real>
class BasicGate2 {
  public:
    BasicGate2(Matrix4<Real> matrix, int first, int second, std::string name = "U2", std::optional<Real> param = {})
        : matrix_(std::move(matrix)), first_(first), second_(second), name_(std::move(name)), param_(param) {
        if (first_ < 0 || second_ < 0) throw InputError("gate targets must be nonnegative");
        if (first_ == second_) throw InputError("two-qubit gate needs distinct targets");
        if (!detail::is_unitary(matrix_, unitary_tolerance<Real>())) throw InvariantError("non-unitary two-qubit gate " + name_);
    }

    const Matrix4<Real>& matrix() const { return matrix_; }
    int first() const { return first_; }
    int second() const { return second_; }
    const std::string& name() const { return name_; }
    std::optional<Real> param() const { return param_; }
    BasicGate2 adjoint() const { return BasicGate2(matrix_.adjoint(), first_, second_, name_ + "_dg", param_); }

  private:
    Matrix4<Real> matrix_;
    int first_;
    int second_;
    std::string name_;
    std::optional<Real> param_;
};

template <typename Real>
using BasicGate = std::variant<BasicGate1<Real>, BasicGate2<Real>>;

/// Pure state of `num_qubits` qubits stored as 2^L complex amplitudes.
template <typename Real>
class BasicState {
  public:
    using Complex = std::complex<Real>;

    /// |0...0>.
    explicit BasicState(int num_qubits) : BasicState(num_qubits, Bits{0}) {}

    BasicState(int num_qubits, Bits basis_index) : num_qubits_(num_qubits) {
        detail::check_capacity(num_qubits);
        amplitudes_ = AmplitudeVector<Real>::Zero(Eigen::Index{1} << num_qubits);
        if (basis_index >= static_cast<Bits>(amplitudes_.size())) throw InputError("basis index out of range");
        amplitudes_[static_cast<Eigen::Index>(basis_index)] = Complex{1};
    }

    /// Adopts an amplitude vector; it must have length 2^L and unit norm within 1e-10.
    static BasicState from_amplitudes(AmplitudeVector<Real> amplitudes) {
        const auto size = amplitudes.size();
        if (size < 2 || (size & (size - 1)) != 0) throw InputError("amplitude vector length must be a power of two");
        const int n = std::countr_zero(static_cast<std::uint64_t>(size));
        detail::check_capacity(n);
        if (std::abs(amplitudes.squaredNorm() - Real{1}) > 1e-10) throw InvariantError("amplitude vector is not normalized");
        BasicState out(n);
        out.amplitudes_ = std::move(amplitudes);
        return out;
    }

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dimension() const { return amplitudes_.size(); }
    const AmplitudeVector<Real>& amplitudes() const { return amplitudes_; }
    Complex amplitude(Bits index) const { return amplitudes_[static_cast<Eigen::Index>(index)]; }
    Real norm() const { return amplitudes_.norm(); }

    BasicState& apply(const BasicGate1<Real>& gate) {
        check_target(gate.target());
        const Eigen::Index stride = Eigen::Index{1} << bit_position(gate.target(), num_qubits_);
        const auto& m = gate.matrix();
        const Eigen::Index dim = dimension();
        for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
            for (Eigen::Index i = block; i < block + stride; ++i) {
                const Complex a0 = amplitudes_[i];
                const Complex a1 = amplitudes_[i + stride];
                amplitudes_[i] = m(0, 0) * a0 + m(0, 1) * a1;
                amplitudes_[i + stride] = m(1, 0) * a0 + m(1, 1) * a1;
            }
        }
        return *this;
    }

    BasicState& apply(const BasicGate2<Real>& gate) {
        check_target(gate.first());
        check_target(gate.second());
        const Eigen::Index hi = Eigen::Index{1} << bit_position(gate.first(), num_qubits_);
        const Eigen::Index lo = Eigen::Index{1} << bit_position(gate.second(), num_qubits_);
        const Eigen::Index mask = hi | lo;
        const auto& m = gate.matrix();
        const Eigen::Index dim = dimension();
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i & mask) continue;
            const Eigen::Index idx[4] = {i, i | lo, i | hi, i | hi | lo};
            const Complex in[4] = {amplitudes_[idx[0]], amplitudes_[idx[1]], amplitudes_[idx[2]], amplitudes_[idx[3]]};
            for (int r = 0; r < 4; ++r) {
                amplitudes_[idx[r]] = m(r, 0) * in[0] + m(r, 1) * in[1] + m(r, 2) * in[2] + m(r, 3) * in[3];
            }
        }
        return *this;
    }

    BasicState& apply(const BasicGate<Real>& gate) {
        std::visit([this](const auto& g) { apply(g); }, gate);
        return *this;
    }

  private:
    void check_target(int q) const {
        if (q < 0 || q >= num_qubits_) {
            throw InputError("gate target " + std::to_string(q) + " out of range for " + std::to_string(num_qubits_) + " qubits");
        }
    }

    int num_qubits_;
    AmplitudeVector<Real> amplitudes_;
};

/// Builds a basis state from a bitstring such as "1010" (site 1 first).
template <typename Real = double>
BasicState<Real> new_basis_state(int num_qubits, std::string_view bits) {
    detail::check_capacity(num_qubits);
    if (static_cast<int>(bits.size()) != num_qubits) throw InputError("bitstring length does not match qubit count");
    return BasicState<Real>(num_qubits, parse_bitstring(bits));
}

template <typename Real>
std::complex<Real> overlap(const BasicState<Real>& a, const BasicState<Real>& b) {
    if (a.num_qubits() != b.num_qubits()) throw InputError("overlap of states with different qubit counts");
    return a.amplitudes().dot(b.amplitudes());
}

/// Outcome probabilities over all 2^L bitstrings.
template <typename Real>
struct BasicDistribution {
    int num_qubits = 0;
    Eigen::Matrix<Real, Eigen::Dynamic, 1> probs;

    Real total() const { return probs.sum(); }
    Eigen::Index dimension() const { return probs.size(); }
};

template <typename Real>
BasicDistribution<Real> probabilities(const BasicState<Real>& state) {
    return {state.num_qubits(), state.amplitudes().cwiseAbs2()};
}

/// Marginal over `qubits` (ordered; the first listed qubit is the high bit).
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> marginal(const BasicDistribution<Real>& dist, std::span<const int> qubits) {
    Eigen::Matrix<Real, Eigen::Dynamic, 1> out = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(Eigen::Index{1} << qubits.size());
    for (Eigen::Index i = 0; i < dist.dimension(); ++i) {
        out[static_cast<Eigen::Index>(extract_bits(static_cast<Bits>(i), qubits, dist.num_qubits))] += dist.probs[i];
    }
    return out;
}

namespace detail {

inline std::vector<int> checked_subset(std::span<const int> subset, int num_qubits, int cap) {
    if (subset.empty()) throw InputError("subsystem must be nonempty");
    std::vector<int> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InputError("subsystem has repeated qubits");
    if (sorted.front() < 0 || sorted.back() >= num_qubits) throw InputError("subsystem qubit out of range");
    if (static_cast<int>(sorted.size()) > cap) {
        throw CapacityError("subsystem of " + std::to_string(sorted.size()) + " qubits exceeds dense limit " + std::to_string(cap));
    }
    return sorted;
}

/// Reshapes the amplitudes into a (2^|A|) x (2^|rest|) matrix.
template <typename Real>
DenseMatrix<Real> bipartite_matrix(const BasicState<Real>& state, const std::vector<int>& subset) {
    const int n = state.num_qubits();
    std::vector<int> rest;
    for (int q = 0; q < n; ++q) {
        if (!std::binary_search(subset.begin(), subset.end(), q)) rest.push_back(q);
    }
    DenseMatrix<Real> m(Eigen::Index{1} << subset.size(), Eigen::Index{1} << rest.size());
    for (Eigen::Index i = 0; i < state.dimension(); ++i) {
        const Bits b = static_cast<Bits>(i);
        m(static_cast<Eigen::Index>(extract_bits(b, subset, n)), static_cast<Eigen::Index>(extract_bits(b, rest, n))) =
            state.amplitudes()[i];
    }
    return m;
}

} // namespace detail

/// rho_A = Tr_rest |psi><psi|, basis ordered by the sorted subset (lowest qubit = high bit).
template <typename Real>
DenseMatrix<Real> reduced_density_matrix(const BasicState<Real>& state, std::span<const int> subset) {
    const auto sorted = detail::checked_subset(subset, state.num_qubits(), kMaxReducedQubits);
    const auto m = detail::bipartite_matrix(state, sorted);
    return m * m.adjoint();
}

/// Tr[rho_A^2] without the 12-qubit cap; uses the smaller Gram matrix of the bipartition.
template <typename Real>
Real subsystem_purity(const BasicState<Real>& state, std::span<const int> subset) {
    const auto sorted = detail::checked_subset(subset, state.num_qubits(), state.num_qubits());
    const auto m = detail::bipartite_matrix(state, sorted);
    const DenseMatrix<Real> gram = (m.rows() <= m.cols()) ? DenseMatrix<Real>(m * m.adjoint()) : DenseMatrix<Real>(m.adjoint() * m);
    return gram.cwiseAbs2().sum();
}

/// Bitstring histogram: index -> count.
struct Counts {
    int num_qubits = 0;
    std::map<Bits, std::uint64_t> hist;

    std::uint64_t total() const {
        return std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}, [](auto acc, const auto& kv) { return acc + kv.second; });
    }
    bool empty() const { return total() == 0; }
};

/// Multinomial sample of `n_shots` outcomes. Deterministic for a fixed generator state.
template <typename Real>
Counts sample_shots(const BasicDistribution<Real>& dist, std::uint64_t n_shots, std::mt19937_64& rng) {
    if (n_shots < 1) throw InputError("n_shots must be at least 1");
    Counts out{dist.num_qubits, {}};
    const Eigen::Index dim = dist.dimension();
    Real mass_left = dist.total();
    if (!(mass_left > Real{0})) throw InvariantError("distribution has no probability mass");
    if (static_cast<std::uint64_t>(dim) <= n_shots) {
        // Sequential conditional binomials: O(2^L) draws.
        std::uint64_t remaining = n_shots;
        for (Eigen::Index i = 0; i < dim && remaining > 0; ++i) {
            const Real p = dist.probs[i];
            if (p <= Real{0}) continue;
            std::uint64_t k = remaining;
            if (i + 1 < dim && p < mass_left) {
                const double frac = std::clamp(static_cast<double>(p / mass_left), 0.0, 1.0);
                k = std::binomial_distribution<std::uint64_t>(remaining, frac)(rng);
            }
            if (k > 0) out.hist[static_cast<Bits>(i)] += k;
            remaining -= k;
            mass_left -= p;
        }
        if (remaining > 0) {
            // Roundoff left shots unassigned; they belong to the last outcome with mass.
            for (Eigen::Index i = dim - 1; i >= 0; --i) {
                if (dist.probs[i] > Real{0}) {
                    out.hist[static_cast<Bits>(i)] += remaining;
                    break;
                }
            }
        }
        return out;
    }
    // Inverse-CDF draws: O(2^L + n log 2^L).
    std::vector<double> cdf(static_cast<std::size_t>(dim));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        acc += static_cast<double>(dist.probs[i]);
        cdf[static_cast<std::size_t>(i)] = acc;
    }
    std::uniform_real_distribution<double> uniform(0.0, acc);
    for (std::uint64_t s = 0; s < n_shots; ++s) {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), uniform(rng));
        if (it == cdf.end()) --it;
        auto idx = static_cast<std::size_t>(it - cdf.begin());
        while (dist.probs[static_cast<Eigen::Index>(idx)] <= Real{0} && idx > 0) --idx;
        out.hist[static_cast<Bits>(idx)] += 1;
    }
    return out;
}

using QuantumState = BasicState<double>;
using Gate1 = BasicGate1<double>;
using Gate2 = BasicGate2<double>;
using Gate = BasicGate<double>;
using Distribution = BasicDistribution<double>;
using Complex = std::complex<double>;

} // namespace sshq

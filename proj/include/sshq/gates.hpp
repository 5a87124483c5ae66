#pragma once

#include <cmath>
#include <numbers>

#include "sshq/state.hpp"

namespace sshq::gates {

template <typename Real = double>
BasicGate1<Real> x(int q) {
    Matrix2<Real> m;
    m << 0, 1, 1, 0;
    return {m, q, "X"};
}

template <typename Real = double>
BasicGate1<Real> h(int q) {
    const Real r = Real{1} / std::sqrt(Real{2});
    Matrix2<Real> m;
    m << r, r, r, -r;
    return {m, q, "H"};
}

template <typename Real = double>
BasicGate1<Real> s(int q) {
    Matrix2<Real> m;
    m << 1, 0, 0, std::complex<Real>(0, 1);
    return {m, q, "S"};
}

template <typename Real = double>
BasicGate1<Real> sdg(int q) {
    Matrix2<Real> m;
    m << 1, 0, 0, std::complex<Real>(0, -1);
    return {m, q, "SDG"};
}

/// R_z(theta) = diag(e^{-i theta/2}, e^{+i theta/2}).
template <typename Real = double>
BasicGate1<Real> rz(int q, Real theta) {
    Matrix2<Real> m = Matrix2<Real>::Zero();
    m(0, 0) = std::polar(Real{1}, -theta / 2);
    m(1, 1) = std::polar(Real{1}, theta / 2);
    return {m, q, "RZ", theta};
}

/// Controlled-NOT with `control` as the high bit of the 4x4 basis.
template <typename Real = double>
BasicGate2<Real> cx(int control, int target) {
    Matrix4<Real> m = Matrix4<Real>::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = Real{1};
    return {m, control, target, "CX"};
}

/// Closed-form exp(-i t (XX + YY)): identity on |00>,|11>; on {|01>,|10>} it is
/// cos(2t) - i sin(2t) sigma^x.
template <typename Real = double>
Matrix4<Real> xy_exchange_matrix(Real t) {
    Matrix4<Real> m = Matrix4<Real>::Zero();
    const Real c = std::cos(2 * t);
    const Real sn = std::sin(2 * t);
    m(0, 0) = m(3, 3) = Real{1};
    m(1, 1) = m(2, 2) = c;
    m(1, 2) = m(2, 1) = std::complex<Real>(0, -sn);
    return m;
}

template <typename Real = double>
BasicGate2<Real> xy_exchange(int first, int second, Real t) {
    return {xy_exchange_matrix<Real>(t), first, second, "XY", t};
}

} // namespace sshq::gates

#pragma once

// 2x2 complex transfer matrices acting on (laser-port, detector-port) field pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "ospring/error.hpp"

namespace ospring {

using Complex = std::complex<double>;

/// Pair of field amplitudes, first = laser-port side, second = detector-port side.
struct FieldPair {
    Complex first{};
    Complex second{};

    friend FieldPair operator+(const FieldPair& a, const FieldPair& b) {
        return {a.first + b.first, a.second + b.second};
    }
    friend FieldPair operator*(Complex s, const FieldPair& v) { return {s * v.first, s * v.second}; }
};

/// Sesquilinear product u^H v.
inline Complex inner(const FieldPair& u, const FieldPair& v) {
    return std::conj(u.first) * v.first + std::conj(u.second) * v.second;
}

struct TwoPortMatrix {
    Complex m11{}, m12{}, m21{}, m22{};

    static constexpr TwoPortMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr TwoPortMatrix zero() { return {0.0, 0.0, 0.0, 0.0}; }
    static constexpr TwoPortMatrix diagonal(Complex a, Complex d) { return {a, 0.0, 0.0, d}; }

    Complex determinant() const { return m11 * m22 - m12 * m21; }
    Complex trace() const { return m11 + m22; }

    TwoPortMatrix transpose() const { return {m11, m21, m12, m22}; }
    TwoPortMatrix conjugate() const {
        return {std::conj(m11), std::conj(m12), std::conj(m21), std::conj(m22)};
    }
    TwoPortMatrix adjoint() const { return transpose().conjugate(); }

    FieldPair column(int j) const { return j == 0 ? FieldPair{m11, m21} : FieldPair{m12, m22}; }

    bool is_finite() const {
        for (const Complex& z : {m11, m12, m21, m22}) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
        return true;
    }

    friend TwoPortMatrix operator*(const TwoPortMatrix& a, const TwoPortMatrix& b) {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
    friend TwoPortMatrix operator+(const TwoPortMatrix& a, const TwoPortMatrix& b) {
        return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
    }
    friend TwoPortMatrix operator-(const TwoPortMatrix& a, const TwoPortMatrix& b) {
        return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
    }
    friend TwoPortMatrix operator*(Complex s, const TwoPortMatrix& a) {
        return {s * a.m11, s * a.m12, s * a.m21, s * a.m22};
    }
    friend FieldPair operator*(const TwoPortMatrix& a, const FieldPair& v) {
        return {a.m11 * v.first + a.m12 * v.second, a.m21 * v.first + a.m22 * v.second};
    }
};

/// Closed-form (adjugate / determinant) inverse; throws SingularMatrix when |det| < 1e-14.
inline TwoPortMatrix inverse(const TwoPortMatrix& a) {
    const Complex det = a.determinant();
    if (std::abs(det) < 1e-14) throw SingularMatrix(std::abs(det));
    const Complex inv = 1.0 / det;
    return {inv * a.m22, -inv * a.m12, -inv * a.m21, inv * a.m11};
}

/// Largest elementwise modulus of a - b.
inline double max_abs_difference(const TwoPortMatrix& a, const TwoPortMatrix& b) {
    const TwoPortMatrix d = a - b;
    return std::max({std::abs(d.m11), std::abs(d.m12), std::abs(d.m21), std::abs(d.m22)});
}

/// ||M^H M - I||_max
inline double unitarity_defect(const TwoPortMatrix& m) {
    return max_abs_difference(m.adjoint() * m, TwoPortMatrix::identity());
}

} // namespace ospring

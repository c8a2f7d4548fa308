#pragma once

// Dense real/complex polynomials with ascending coefficients, a Routh table and
// companion-matrix root finding.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

namespace ospring {

template <class T>
class Polynomial {
public:
    Polynomial() : c_{T(0)} {}
    Polynomial(std::initializer_list<T> coefficients) : c_(coefficients) { trim(); }
    explicit Polynomial(std::vector<T> coefficients) : c_(std::move(coefficients)) { trim(); }

    /// c[k] multiplies s^k.
    const std::vector<T>& coefficients() const { return c_; }
    T operator[](std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
    std::size_t degree() const { return c_.size() - 1; }
    T leading() const { return c_.back(); }

    template <class U>
    auto operator()(U x) const {
        decltype(T(0) * x) acc = T(0);
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
        return acc;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] + b[k];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(T s, Polynomial p) {
        for (auto& x : p.c_) x *= s;
        p.trim();
        return p;
    }

    /// p(scale * u) as a polynomial in u.
    Polynomial rescaled(T scale) const {
        std::vector<T> c = c_;
        T f = T(1);
        for (auto& x : c) {
            x *= f;
            f *= scale;
        }
        return Polynomial(std::move(c));
    }

private:
    void trim() {
        while (c_.size() > 1 && c_.back() == T(0)) c_.pop_back();
        if (c_.empty()) c_.push_back(T(0));
    }

    std::vector<T> c_;
};

/// First column of the Routh array of a real polynomial, highest power first.
/// A zero pivot ends the table early (the polynomial is then not Hurwitz).
inline std::vector<double> routh_first_column(const Polynomial<double>& p) {
    const std::size_t n = p.degree();
    const std::size_t width = n / 2 + 1;
    std::vector<double> upper(width, 0.0), lower(width, 0.0);
    for (std::size_t k = 0; 2 * k <= n; ++k) upper[k] = p[n - 2 * k];
    for (std::size_t k = 0; 2 * k + 1 <= n; ++k) lower[k] = p[n - 2 * k - 1];
    std::vector<double> column{upper[0]};
    for (std::size_t row = 1; row <= n; ++row) {
        column.push_back(lower[0]);
        if (lower[0] == 0.0) break;
        std::vector<double> next(width, 0.0);
        for (std::size_t k = 0; k + 1 < width; ++k)
            next[k] = (lower[0] * upper[k + 1] - upper[0] * lower[k + 1]) / lower[0];
        upper = std::move(lower);
        lower = std::move(next);
    }
    return column;
}

/// True iff every root lies in the open left half-plane (all Routh pivots share the leading sign).
inline bool routh_hurwitz_stable(const Polynomial<double>& p) {
    const std::vector<double> column = routh_first_column(p);
    if (column.size() != p.degree() + 1) return false;
    const bool positive = column.front() > 0.0;
    return std::all_of(column.begin(), column.end(),
                       [&](double v) { return positive ? v > 0.0 : v < 0.0; });
}

namespace detail {

/// A few Newton steps on p; eigenvalues of the companion matrix lose absolute
/// accuracy for roots much smaller than the others. Steps that do not shrink |p| are rejected.
inline std::complex<double> newton_polish(const Polynomial<double>& p, std::complex<double> z) {
    std::vector<double> dc;
    for (std::size_t k = 1; k <= p.degree(); ++k) dc.push_back(static_cast<double>(k) * p[k]);
    const Polynomial<double> dp(dc.empty() ? std::vector<double>{0.0} : dc);
    std::complex<double> pz = p(z);
    for (int i = 0; i < 8 && pz != 0.0; ++i) {
        const std::complex<double> slope = dp(z);
        if (slope == 0.0) break;
        const std::complex<double> next = z - pz / slope;
        const std::complex<double> pn = p(next);
        if (!(std::abs(pn) < std::abs(pz))) break;
        z = next;
        pz = pn;
    }
    return z;
}

} // namespace detail

/// Roots as eigenvalues of the companion matrix, polished by Newton steps. Vanishing low-order coefficients give exact zero roots.
inline std::vector<std::complex<double>> polynomial_roots(const Polynomial<double>& p) {
    std::vector<std::complex<double>> roots;
    std::size_t low = 0;
    while (low < p.degree() && p[low] == 0.0) {
        roots.emplace_back(0.0, 0.0);
        ++low;
    }
    const std::size_t n = p.degree() - low;
    if (n > 0) {
        const auto dim = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(dim, dim);
        const double lead = p.leading();
        for (std::size_t k = 0; k < n; ++k) {
            companion(0, static_cast<Eigen::Index>(k)) = -p[low + n - 1 - k] / lead;
            if (k + 1 < n) companion(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k)) = 1.0;
        }
        const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
        if (solver.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue solver failed");
        const Polynomial<double> reduced(std::vector<double>(p.coefficients().begin() + static_cast<std::ptrdiff_t>(low),
                                                             p.coefficients().end()));
        for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
            roots.push_back(detail::newton_polish(reduced, solver.eigenvalues()[i]));
    }
    std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

} // namespace ospring

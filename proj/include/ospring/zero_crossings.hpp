#pragma once

// Scan-then-bisect location of sign changes of a real function on an interval.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ospring {

/// Bisection on [a, b] where f(a) = fa and f(b) have strictly opposite signs.
template <class F>
double bisect_root(F&& f, double a, double b, double fa, double xtol, int max_iterations = 400) {
    for (int i = 0; i < max_iterations && (b - a) > xtol; ++i) {
        const double m = a + 0.5 * (b - a);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return a + 0.5 * (b - a);
}

/// Sorted sign-change locations of f on [lo, hi].
///
/// f is sampled on a uniform grid of n_scan points; every bracket with a strict
/// sign change is refined by bisection until its width is below xtol (default
/// 1e-10 of the interval). Samples that are exactly zero and separate opposite
/// signs are reported directly. Tangential zeros (no sign change) are not
/// reported.
template <class F>
std::vector<double> find_zero_crossings(F&& f, double lo, double hi, std::size_t n_scan,
                                        double xtol = 0.0) {
    if (n_scan < 64) throw std::invalid_argument("find_zero_crossings: n_scan must be >= 64");
    if (!(hi > lo)) throw std::invalid_argument("find_zero_crossings: empty interval");
    if (xtol <= 0.0) xtol = 1e-10 * (hi - lo);

    const double step = (hi - lo) / static_cast<double>(n_scan - 1);
    auto node = [&](std::size_t i) { return i + 1 == n_scan ? hi : lo + step * static_cast<double>(i); };

    std::vector<double> roots;
    bool have_prev = false;
    double x_prev = lo;
    double f_prev = 0.0;
    std::size_t zero_first = 0;
    std::size_t zero_count = 0;

    for (std::size_t i = 0; i < n_scan; ++i) {
        const double x = node(i);
        const double fx = f(x);
        if (!std::isfinite(fx)) throw std::invalid_argument("find_zero_crossings: non-finite sample");
        if (fx == 0.0) {
            if (zero_count++ == 0) zero_first = i;
            continue;
        }
        if (have_prev && ((fx < 0.0) != (f_prev < 0.0))) {
            if (zero_count > 0) {
                roots.push_back(0.5 * (node(zero_first) + node(zero_first + zero_count - 1)));
            } else {
                roots.push_back(bisect_root(f, x_prev, x, f_prev, xtol));
            }
        }
        zero_count = 0;
        have_prev = true;
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

} // namespace ospring

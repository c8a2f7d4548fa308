#pragma once

// Spring/damping zero structure versus detuning, regime labels and stability of
// the coupled membrane-cavity system.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ospring/backaction.hpp"
#include "ospring/cavity_model.hpp"
#include "ospring/error.hpp"
#include "ospring/parallel.hpp"
#include "ospring/polynomial.hpp"
#include "ospring/zero_crossings.hpp"

namespace ospring {

/// Characteristic polynomial in s = -i omega of m s^2 + 2 m gamma_mech s + m omega_m^2 + K(s) = 0
/// with the single-mode kernel, cleared of its denominator [(gamma + s)^2 + Delta^2](gamma^2 + Delta^2).
inline Polynomial<double> characteristic_polynomial(const EffectiveCavity& e, const KernelScale& scale,
                                                    const MechanicalOscillator& osc) {
    const double g = e.linewidth;
    const double d = e.detuning;
    const double g2d2 = g * g + d * d;
    const Polynomial<double> mechanics{osc.mass * osc.frequency * osc.frequency, 2.0 * osc.mass * osc.damping,
                                       osc.mass};
    const Polynomial<double> resonance{g2d2, 2.0 * g, 1.0};
    const Polynomial<double> numerator{
        e.srm_detuning * (g2d2 - 4.0 * (g * e.membrane_linewidth + d * e.membrane_detuning)),
        -2.0 * (e.srm_linewidth * e.membrane_detuning + e.membrane_linewidth * e.srm_detuning),
        -e.membrane_detuning};
    return g2d2 * (mechanics * resonance) + scale.prefactor() * numerator;
}

namespace detail {

/// Characteristic polynomial in u = s / rate, scaled to unit largest coefficient.
inline Polynomial<double> conditioned_polynomial(const EffectiveCavity& e, const KernelScale& scale,
                                                 const MechanicalOscillator& osc) {
    const Polynomial<double> p = characteristic_polynomial(e, scale, osc);
    if (p.degree() < 4 || p.leading() == 0.0) throw DegenerateLeadingCoefficient();
    const double rate = e.linewidth > 0.0 ? e.linewidth : (e.detuning != 0.0 ? std::abs(e.detuning) : 1.0);
    const Polynomial<double> u = p.rescaled(rate);
    double peak = 0.0;
    for (double c : u.coefficients()) peak = std::max(peak, std::abs(c));
    return (1.0 / peak) * u;
}

} // namespace detail

/// Routh-Hurwitz verdict: true iff every closed-loop pole has negative real part.
inline bool routh_hurwitz(const EffectiveCavity& e, const KernelScale& scale, const MechanicalOscillator& osc) {
    return routh_hurwitz_stable(detail::conditioned_polynomial(e, scale, osc));
}

/// Same question answered from the companion-matrix roots.
inline bool roots_stable(const EffectiveCavity& e, const KernelScale& scale, const MechanicalOscillator& osc) {
    const auto roots = polynomial_roots(detail::conditioned_polynomial(e, scale, osc));
    return std::all_of(roots.begin(), roots.end(), [](auto r) { return r.real() < 0.0; });
}

inline bool routh_hurwitz(const InterferometerConfig& cfg, const MechanicalOscillator& osc, double detuning) {
    osc.validate();
    return routh_hurwitz(effective_cavity(cfg).detuned(detuning), KernelScale::of(cfg), osc);
}

inline bool roots_stable(const InterferometerConfig& cfg, const MechanicalOscillator& osc, double detuning) {
    osc.validate();
    return roots_stable(effective_cavity(cfg).detuned(detuning), KernelScale::of(cfg), osc);
}

// ---------------------------------------------------------------------------
// Regimes
// ---------------------------------------------------------------------------

enum class RegimeLabel { cooling, heating, stable_spring, unstable_spring, neutral };

inline std::string to_string(RegimeLabel r) {
    switch (r) {
    case RegimeLabel::cooling: return "cooling";
    case RegimeLabel::heating: return "heating";
    case RegimeLabel::stable_spring: return "stable_spring";
    case RegimeLabel::unstable_spring: return "unstable_spring";
    case RegimeLabel::neutral: return "neutral";
    }
    return "?";
}

/// Gamma > 0: stable_spring if K > 0 else cooling; Gamma < 0: unstable_spring if K > 0 else heating.
/// Values below the floors are treated as zero and give neutral.
inline RegimeLabel classify(double spring, double damping, double spring_floor = 0.0, double damping_floor = 0.0) {
    if (std::abs(spring) <= spring_floor || std::abs(damping) <= damping_floor) return RegimeLabel::neutral;
    if (damping > 0.0) return spring > 0.0 ? RegimeLabel::stable_spring : RegimeLabel::cooling;
    return spring > 0.0 ? RegimeLabel::unstable_spring : RegimeLabel::heating;
}

namespace detail {

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Labels with the neutral floor at 1e-12 of the largest |K| and |Gamma| of the sweep.
inline std::vector<RegimeLabel> label_sweep(std::span<const double> spring, std::span<const double> damping) {
    const double kf = 1e-12 * max_abs(spring);
    const double gf = 1e-12 * max_abs(damping);
    std::vector<RegimeLabel> out(spring.size());
    for (std::size_t i = 0; i < spring.size(); ++i) out[i] = classify(spring[i], damping[i], kf, gf);
    return out;
}

} // namespace detail

struct StabilityReport {
    std::vector<double> detuning;  // rad/s
    std::vector<double> spring;    // N/m
    std::vector<double> damping;   // N s/m
    std::vector<RegimeLabel> labels;
    std::vector<bool> rh_verdicts;
    std::vector<bool> root_verdicts;
    std::vector<double> spring_zeros;   // rad/s
    std::vector<double> damping_zeros;  // rad/s
    std::vector<std::pair<double, double>> stable_windows; // K > 0 and Gamma > 0

    bool oracles_agree() const { return rh_verdicts == root_verdicts; }
};

/// Zero crossings and stable-spring windows over [min, max] of the detuning grid, plus per-point
/// labels and stability verdicts. K and Gamma use `method` at omega_eval (0: static limit);
/// the verdicts always use the single-mode characteristic polynomial.
inline StabilityReport stability_report(const InterferometerConfig& cfg, const MechanicalOscillator& osc,
                                        std::span<const double> detunings, double omega_eval,
                                        Method method = Method::narrowband, std::size_t n_scan = 4001) {
    osc.validate();
    if (detunings.size() < 2) throw std::invalid_argument("stability sweep needs at least two detunings");
    const auto [lo_it, hi_it] = std::minmax_element(detunings.begin(), detunings.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw std::invalid_argument("stability sweep has an empty detuning range");

    const EffectiveCavity cavity = effective_cavity(cfg);
    const KernelScale scale = KernelScale::of(cfg);

    StabilityReport r;
    const BackActionResponse sweep = detuning_sweep(cfg, detunings, omega_eval, method);
    r.detuning = sweep.detuning;
    r.spring = sweep.spring;
    r.damping = sweep.damping;
    r.labels = detail::label_sweep(r.spring, r.damping);

    std::vector<char> rh(detunings.size()), roots(detunings.size());
    parallel_for(detunings.size(), [&](std::size_t i) {
        const EffectiveCavity e = cavity.detuned(detunings[i]);
        rh[i] = routh_hurwitz(e, scale, osc);
        roots[i] = roots_stable(e, scale, osc);
    });
    r.rh_verdicts.assign(rh.begin(), rh.end());
    r.root_verdicts.assign(roots.begin(), roots.end());

    auto point = [&](double d) {
        BackActionResponse one;
        one.resize(1);
        detail::evaluate_point(cfg, cavity, method, d, omega_eval, one, 0);
        return SpringDamping{one.spring[0], one.damping[0]};
    };
    const double xtol = 1e-9 * (cavity.linewidth > 0.0 ? cavity.linewidth : hi - lo);
    r.spring_zeros = find_zero_crossings([&](double d) { return point(d).spring; }, lo, hi, n_scan, xtol);
    r.damping_zeros = find_zero_crossings([&](double d) { return point(d).damping; }, lo, hi, n_scan, xtol);

    std::vector<double> breaks{lo, hi};
    breaks.insert(breaks.end(), r.spring_zeros.begin(), r.spring_zeros.end());
    breaks.insert(breaks.end(), r.damping_zeros.begin(), r.damping_zeros.end());
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        if (!(b > a)) continue;
        const SpringDamping mid = point(0.5 * (a + b));
        if (!(mid.spring > 0.0 && mid.damping > 0.0)) continue;
        if (!r.stable_windows.empty() && r.stable_windows.back().second == a)
            r.stable_windows.back().second = b;
        else
            r.stable_windows.emplace_back(a, b);
    }
    return r;
}

struct RegimeMap {
    std::vector<double> detuning; // grid as given, fastest index
    std::vector<double> offset;   // xi [m]
    std::vector<double> node_detuning; // Delta [rad/s] per node, row-major [xi][Delta]
    std::vector<double> spring;
    std::vector<double> damping;
    std::vector<RegimeLabel> labels;

    std::size_t index(std::size_t xi_index, std::size_t detuning_index) const {
        return xi_index * detuning.size() + detuning_index;
    }
};

/// Whether map axes are in units of the linewidth of each xi row rather than rad/s.
struct LinewidthUnits {
    bool detuning = false;
    bool omega = false;
};

/// Regime labels of the single-mode kernel over a (xi, Delta) grid at omega_eval (0: static limit).
/// The neutral floor is taken per xi row.
inline RegimeMap regime_map(const InterferometerConfig& base, std::span<const double> detunings,
                            std::span<const double> offsets, double omega_eval, LinewidthUnits units = {}) {
    if (detunings.empty() || offsets.empty()) throw std::invalid_argument("regime map grids must be nonempty");
    RegimeMap map;
    map.detuning.assign(detunings.begin(), detunings.end());
    map.offset.assign(offsets.begin(), offsets.end());
    const std::size_t nd = detunings.size();
    const std::size_t n = nd * offsets.size();
    map.node_detuning.resize(n);
    map.spring.resize(n);
    map.damping.resize(n);
    map.labels.resize(n);

    std::vector<EffectiveCavity> rows(offsets.size());
    parallel_for(offsets.size(), [&](std::size_t j) {
        InterferometerConfig cfg = base;
        cfg.offset = offsets[j];
        rows[j] = effective_cavity(cfg);
    });
    const KernelScale scale = KernelScale::of(base);

    parallel_for(n, [&](std::size_t k) {
        const EffectiveCavity& row = rows[k / nd];
        const double d = detunings[k % nd] * (units.detuning ? row.linewidth : 1.0);
        const double w = omega_eval * (units.omega ? row.linewidth : 1.0);
        const EffectiveCavity e = row.detuned(d);
        const SpringDamping sd =
            extract_spring_damping([&](double x) { return kernel_narrowband(e, scale, x); }, w, e.linewidth);
        map.node_detuning[k] = d;
        map.spring[k] = sd.spring;
        map.damping[k] = sd.damping;
    });
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        const auto row = detail::label_sweep(std::span<const double>(map.spring).subspan(j * nd, nd),
                                             std::span<const double>(map.damping).subspan(j * nd, nd));
        std::copy(row.begin(), row.end(), map.labels.begin() + static_cast<std::ptrdiff_t>(j * nd));
    }
    return map;
}

enum class ThresholdKind { spring, damping };

/// Smallest gamma_m / gamma at which the free-mass spring (or damping) has three zeros in Delta.
/// Bisection on the ratio; each probe counts sign changes on Delta/gamma in [-5, 5].
inline double anomaly_threshold(ThresholdKind kind, double tolerance = 1e-9, std::size_t n_scan = 40001) {
    const KernelScale unit{speed_of_light / 4.0, 1.0, 1.0, 1.0};
    auto zero_count = [&](double ratio) {
        EffectiveCavity e;
        e.linewidth = 1.0;
        e.membrane_linewidth = ratio;
        e.srm_linewidth = 1.0 - ratio;
        auto f = [&](double d) {
            const SpringDamping sd = free_mass_spring_damping(e, unit, d);
            return kind == ThresholdKind::spring ? sd.spring : sd.damping;
        };
        return find_zero_crossings(f, -5.0, 5.0, n_scan).size();
    };
    double lo = 0.0, hi = 1.0;
    if (zero_count(lo) != 1 || zero_count(hi) != 3) throw std::runtime_error("threshold not bracketed");
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (zero_count(mid) >= 3 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace ospring

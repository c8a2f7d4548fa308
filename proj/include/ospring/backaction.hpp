#pragma once

// Dynamic back-action kernel K(omega) acting on the membrane, F = -K x:
// the exact transfer-matrix form, the single-mode (narrow-band) closed form and
// its free-mass limit, plus extraction of the optical spring and damping.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ospring/cavity_model.hpp"
#include "ospring/parallel.hpp"
#include "ospring/transfer_optics.hpp"
#include "ospring/zero_crossings.hpp"

namespace ospring {

/// Mechanical resonator x'' + 2 gamma_mech x' + omega_m^2 x = F / m.
/// Note gamma_mech is a mechanical rate, unrelated to the optical linewidth gamma_m.
struct MechanicalOscillator {
    double mass = 1.0;      // kg
    double frequency = 0.0; // omega_m [rad/s], 0 for a free mass
    double damping = 0.0;   // gamma_mech [rad/s]

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("oscillator mass must be positive");
        if (!(frequency >= 0.0)) throw std::invalid_argument("oscillator frequency must be non-negative");
        if (!(damping >= 0.0)) throw std::invalid_argument("oscillator damping must be non-negative");
    }
};

/// Scalars entering the narrow-band kernel besides the effective cavity.
struct KernelScale {
    double carrier_frequency = 0.0;      // omega0 [rad/s]
    double input_power = 0.0;            // W
    double cavity_length = 0.0;          // m
    double membrane_reflectivity = 1.0;  // R_m (amplitude)

    /// 4 omega0 R_m^2 P_in / (c L_cav) [N/(m s^2)]
    double prefactor() const {
        return 4.0 * carrier_frequency * membrane_reflectivity * membrane_reflectivity * input_power /
               (speed_of_light * cavity_length);
    }

    static KernelScale of(const InterferometerConfig& cfg) {
        return {cfg.carrier_frequency(), cfg.input_power, cfg.cavity_length(), cfg.membrane.reflectivity};
    }
};

/// Exact kernel evaluator; the mean fields are computed once per operating point.
class ExactKernel {
public:
    explicit ExactKernel(const InterferometerConfig& cfg) : layout_(optical_layout(cfg)) {
        const double omega0 = cfg.carrier_frequency();
        const double amplitude = std::sqrt(cfg.input_power / (reduced_planck * omega0));
        const FieldPair drive{std::polar(amplitude, cfg.laser_phase), 0.0};
        const MembraneFieldMatrices mean = membrane_field_matrices(layout_, 0.0);
        incident_ = mean.incident * drive;
        reflected_ = mean.reflected * drive;
        coefficient_ = Complex(0.0, 2.0 * cfg.carrier_wavenumber() / speed_of_light) *
                       cfg.membrane.reflectivity * reduced_planck * omega0;
    }

    Complex operator()(double omega) const {
        return coefficient_ * (quadratic_form(omega) - std::conj(quadratic_form(-omega)));
    }

    const OpticalLayout& layout() const { return layout_; }

private:
    // b0^H (sigma3 - 2 M_ax(omega)) a0
    Complex quadratic_form(double omega) const {
        const TwoPortMatrix motion = membrane_field_matrices(layout_, omega).motion;
        const TwoPortMatrix op = TwoPortMatrix::diagonal(1.0, -1.0) - Complex(2.0) * motion;
        return inner(reflected_, op * incident_);
    }

    OpticalLayout layout_;
    FieldPair incident_;
    FieldPair reflected_;
    Complex coefficient_;
};

inline Complex kernel_exact(const InterferometerConfig& cfg, double omega) {
    return ExactKernel(cfg)(omega);
}

/// Single-mode kernel
///   K = A / (Delta^2 + (gamma - i omega)^2)
///       * {dSR [gamma^2 + Delta^2 - 4 (gamma gamma_m + Delta d_m)] + 2i (gSR d_m + g_m dSR) omega + d_m omega^2}
///       / (gamma^2 + Delta^2),
/// A = 4 omega0 R_m^2 P_in / (c L_cav).
inline Complex kernel_narrowband(const EffectiveCavity& e, const KernelScale& scale, double omega) {
    const double g = e.linewidth;
    const double d = e.detuning;
    const double dsr = e.srm_detuning;
    const double dm = e.membrane_detuning;
    const double g2d2 = g * g + d * d;
    const Complex braces = dsr * (g2d2 - 4.0 * (g * e.membrane_linewidth + d * dm)) +
                           Complex(0.0, 2.0 * (e.srm_linewidth * dm + e.membrane_linewidth * dsr) * omega) +
                           dm * omega * omega;
    const Complex pole = d * d + (Complex(g, -omega)) * (Complex(g, -omega));
    return scale.prefactor() / pole * braces / g2d2;
}

struct SpringDamping {
    double spring = 0.0;  // N/m
    double damping = 0.0; // N s/m
};

/// Zero-frequency spring and damping of a fully reflective membrane off the
/// dispersive shift (d_m = 0):
///   K = A Delta / (g^2 + D^2) [1 - 4 g g_m / (g^2 + D^2)]
///   Gamma = -A g D / (g^2 + D^2)^2 [1 - (g_m / g)(3 g^2 - D^2) / (g^2 + D^2)].
/// A keeps the R_m^2 factor, so R_m = 1 is the Michelson case.
inline SpringDamping free_mass_spring_damping(const EffectiveCavity& e, const KernelScale& scale,
                                              double detuning) {
    const double a = scale.prefactor();
    const double g = e.linewidth;
    const double gm = e.membrane_linewidth;
    const double s = g * g + detuning * detuning;
    return {a * detuning / s * (1.0 - 4.0 * g * gm / s),
            -a * g * detuning / (s * s) * (1.0 - (gm / g) * (3.0 * g * g - detuning * detuning) / s)};
}

inline double spring_from_kernel(Complex kernel) { return kernel.real(); }

inline double damping_from_kernel(Complex kernel, double omega) {
    if (omega == 0.0) throw std::invalid_argument("damping at omega = 0 needs the static limit");
    return -kernel.imag() / (2.0 * omega);
}

/// -1/2 d Im K / d omega at omega = 0 from samples at h and h/2 (Richardson, h^2 error removed).
template <class Kernel>
double static_damping(Kernel&& kernel, double h) {
    const double coarse = kernel(h).imag() / h;
    const double fine = kernel(h / 2.0).imag() / (h / 2.0);
    return -0.5 * (4.0 * fine - coarse) / 3.0;
}

/// Spring and damping from a kernel callable; omega = 0 uses the static limit with step 1e-6 gamma.
template <class Kernel>
SpringDamping extract_spring_damping(Kernel&& kernel, double omega, double linewidth) {
    if (omega == 0.0) {
        return {kernel(0.0).real(), static_damping(kernel, 1e-6 * linewidth)};
    }
    const Complex k = kernel(omega);
    return {spring_from_kernel(k), damping_from_kernel(k, omega)};
}

enum class Method { exact, narrowband, free_mass };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::exact: return "exact";
    case Method::narrowband: return "narrowband";
    case Method::free_mass: return "freemass";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "exact") return Method::exact;
    if (s == "narrowband") return Method::narrowband;
    if (s == "freemass" || s == "free_mass") return Method::free_mass;
    throw std::invalid_argument("unknown method '" + s + "' (expected exact, narrowband or freemass)");
}

struct BackActionResponse {
    std::vector<double> detuning;  // Delta [rad/s] per point
    std::vector<double> omega;     // sideband frequency [rad/s] per point
    std::vector<Complex> kernel;   // N/m
    std::vector<double> spring;    // N/m
    std::vector<double> damping;   // N s/m
    Method method = Method::exact;

    std::size_t size() const { return kernel.size(); }

    void resize(std::size_t n) {
        detuning.resize(n);
        omega.resize(n);
        kernel.resize(n);
        spring.resize(n);
        damping.resize(n);
    }
};

namespace detail {

/// Kernel at one (Delta, omega) point. free_mass reports K + i(-2 omega Gamma) with omega = 0 limit values.
inline void evaluate_point(const InterferometerConfig& cfg, const EffectiveCavity& cavity, Method method,
                           double detuning, double omega, BackActionResponse& out, std::size_t i) {
    const KernelScale scale = KernelScale::of(cfg);
    const EffectiveCavity e = cavity.detuned(detuning);
    SpringDamping sd;
    Complex k;
    switch (method) {
    case Method::exact: {
        InterferometerConfig c = cfg;
        c.srm_detuning = e.srm_detuning;
        const ExactKernel kernel(c);
        sd = extract_spring_damping(kernel, omega, e.linewidth);
        k = kernel(omega);
        break;
    }
    case Method::narrowband: {
        auto kernel = [&](double w) { return kernel_narrowband(e, scale, w); };
        sd = extract_spring_damping(kernel, omega, e.linewidth);
        k = kernel(omega);
        break;
    }
    case Method::free_mass:
        sd = free_mass_spring_damping(e, scale, detuning);
        k = Complex(sd.spring, 0.0);
        break;
    }
    out.detuning[i] = detuning;
    out.omega[i] = omega;
    out.kernel[i] = k;
    out.spring[i] = sd.spring;
    out.damping[i] = sd.damping;
}

} // namespace detail

/// Response over total detunings Delta at a fixed sideband frequency (the SRM moves, the membrane does not).
inline BackActionResponse detuning_sweep(const InterferometerConfig& cfg, std::span<const double> detunings,
                                         double omega, Method method) {
    const EffectiveCavity cavity = effective_cavity(cfg);
    BackActionResponse out;
    out.method = method;
    out.resize(detunings.size());
    parallel_for(detunings.size(), [&](std::size_t i) {
        detail::evaluate_point(cfg, cavity, method, detunings[i], omega, out, i);
    });
    return out;
}

/// Response over sideband frequencies at the operating point of cfg.
inline BackActionResponse frequency_sweep(const InterferometerConfig& cfg, std::span<const double> omegas,
                                          Method method) {
    const EffectiveCavity cavity = effective_cavity(cfg);
    BackActionResponse out;
    out.method = method;
    out.resize(omegas.size());
    if (method == Method::exact) {
        const ExactKernel kernel(cfg);
        parallel_for(omegas.size(), [&](std::size_t i) {
            const SpringDamping sd = extract_spring_damping(kernel, omegas[i], cavity.linewidth);
            out.detuning[i] = cavity.detuning;
            out.omega[i] = omegas[i];
            out.kernel[i] = kernel(omegas[i]);
            out.spring[i] = sd.spring;
            out.damping[i] = sd.damping;
        });
        return out;
    }
    parallel_for(omegas.size(), [&](std::size_t i) {
        detail::evaluate_point(cfg, cavity, method, cavity.detuning, omegas[i], out, i);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Canonical (dark-port) features
// ---------------------------------------------------------------------------

struct FeatureResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct FeatureReport {
    std::vector<FeatureResult> features;
    std::vector<double> spring_zeros;
    std::vector<double> damping_zeros;

    bool all_passed() const {
        return std::all_of(features.begin(), features.end(), [](const auto& f) { return f.passed; });
    }
};

/// Checks on Delta in [-5 gamma, 5 gamma]:
/// (i) K and Gamma odd in Delta, (ii) Gamma has a single zero and is positive for Delta < 0,
/// (iii) K crosses zero once when gamma >= omega, (iv) three times otherwise.
namespace detail {

inline std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace detail

template <class Spring, class Damping>
FeatureReport canonical_features_check(Spring&& spring, Damping&& damping, double linewidth, double omega,
                                       std::size_t n_scan = 4001) {
    FeatureReport report;
    const double lo = -5.0 * linewidth;
    const double hi = 5.0 * linewidth;
    const double xtol = 1e-9 * linewidth;
    report.spring_zeros = find_zero_crossings(spring, lo, hi, n_scan, xtol);
    report.damping_zeros = find_zero_crossings(damping, lo, hi, n_scan, xtol);

    double k_scale = 0.0, g_scale = 0.0, k_odd = 0.0, g_odd = 0.0;
    bool damping_positive = true;
    for (std::size_t i = 1; i < n_scan / 2 + 1; ++i) {
        const double d = hi * static_cast<double>(i) / static_cast<double>(n_scan / 2);
        const double kp = spring(d), km = spring(-d);
        const double gp = damping(d), gm = damping(-d);
        k_scale = std::max({k_scale, std::abs(kp), std::abs(km)});
        g_scale = std::max({g_scale, std::abs(gp), std::abs(gm)});
        k_odd = std::max(k_odd, std::abs(kp + km));
        g_odd = std::max(g_odd, std::abs(gp + gm));
        if (!(gm > 0.0)) damping_positive = false;
    }
    const double k_rel = k_scale > 0.0 ? k_odd / k_scale : k_odd;
    const double g_rel = g_scale > 0.0 ? g_odd / g_scale : g_odd;
    report.features.push_back({"antisymmetry", k_rel < 1e-10 && g_rel < 1e-10,
                               "max |f(D) + f(-D)| / max|f|: spring " + detail::short_number(k_rel) + ", damping " +
                                   detail::short_number(g_rel)});
    report.features.push_back({"damping single zero, positive below resonance",
                               report.damping_zeros.size() == 1 && damping_positive,
                               std::to_string(report.damping_zeros.size()) + " damping zero(s)"});
    const std::size_t expected = linewidth >= omega ? 1 : 3;
    report.features.push_back({linewidth >= omega ? "spring single zero (gamma >= omega)"
                                                  : "spring three zeros (gamma < omega)",
                               report.spring_zeros.size() == expected,
                               std::to_string(report.spring_zeros.size()) + " spring zero(s), expected " +
                                   std::to_string(expected)});
    return report;
}

/// Canonical features of the narrow-band kernel of an effective cavity at frequency omega (> 0).
inline FeatureReport canonical_features_check(const EffectiveCavity& cavity, const KernelScale& scale,
                                              double omega, std::size_t n_scan = 4001) {
    if (!(omega > 0.0)) throw std::invalid_argument("canonical features need omega > 0");
    auto spring = [&](double d) { return kernel_narrowband(cavity.detuned(d), scale, omega).real(); };
    auto damping = [&](double d) {
        return damping_from_kernel(kernel_narrowband(cavity.detuned(d), scale, omega), omega);
    };
    return canonical_features_check(spring, damping, cavity.linewidth, omega, n_scan);
}

} // namespace ospring

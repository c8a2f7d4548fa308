#pragma once

// Dark-port geometry of the Michelson-Sagnac interferometer and its reduction,
// with the signal-recycling mirror, to a single effective cavity mode.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ospring/constants.hpp"
#include "ospring/error.hpp"
#include "ospring/transfer_optics.hpp"
#include "ospring/zero_crossings.hpp"

namespace ospring {

/// Full physical description of a signal-recycled MSI operating point.
///
/// The membrane position is given as a dark-port index n (odd) plus an offset xi
/// from that dark fringe, dl = dl_DP(n) + xi. The SRM position is given by the
/// detuning delta_SR of the carrier from the dark-port cavity resonance.
struct InterferometerConfig {
    double wavelength = 1064e-9;  // lambda0 [m]
    double arm_length = 0.04;     // L [m]
    double half_arm = 0.03;       // l [m]
    double sr_distance = 0.017;   // l_SR [m]
    MirrorParams membrane = MirrorParams::from_power_reflectivity(0.17);
    MirrorParams srm = MirrorParams::from_power_transmissivity(3e-4);
    BeamsplitterParams beamsplitter{};
    double input_power = 0.2;     // P_in [W]
    int dark_port_index = 1;      // n, odd positive
    double offset = 0.0;          // xi [m]
    double srm_detuning = 0.0;    // delta_SR [rad/s]
    double laser_phase = 0.0;     // arg A_L0; a gauge, observables do not depend on it
    ImbalancePhase imbalance = ImbalancePhase::exact;

    double cavity_length() const { return arm_length + half_arm + sr_distance; }
    double carrier_wavenumber() const { return two_pi / wavelength; }
    double carrier_frequency() const { return speed_of_light * carrier_wavenumber(); }

    void validate() const {
        if (!(input_power >= 0.0)) throw std::invalid_argument("input power must be non-negative");
        if (dark_port_index <= 0 || dark_port_index % 2 == 0)
            throw std::invalid_argument("dark-port index must be an odd positive integer");
        membrane.validate();
        srm.validate();
        beamsplitter.validate();
    }
};

/// Fraction q such that k0 * dl_DP = 2*pi*q. Throws NoDarkPort if tau = 0 has no solution.
inline double dark_port_fraction(const MirrorParams& membrane, const BeamsplitterParams& bs, int n) {
    if (n <= 0 || n % 2 == 0) throw std::invalid_argument("dark-port index must be an odd positive integer");
    const double d = bs.asymmetry;
    if (!(membrane.reflectivity > 0.0)) throw NoDarkPort("membrane reflectivity is zero");
    if (!(std::abs(d) < 1.0)) throw NoDarkPort("beamsplitter asymmetry must lie in (-1, 1)");
    const double cosine = -(membrane.transmissivity / membrane.reflectivity) * d / std::sqrt(1.0 - d * d);
    if (std::abs(cosine) > 1.0)
        throw NoDarkPort("no dark port: |T_m d_BS / (R_m sqrt(1 - d_BS^2))| > 1");
    const double branch = std::acos(cosine) / two_pi;
    // odd n enumerates the solutions of cos(theta) = cosine in increasing order
    if (n % 4 == 1) return static_cast<double>((n - 1) / 4) + branch;
    return static_cast<double>((n + 1) / 4) - branch;
}

/// n-th arm imbalance dl_DP with tau(dl_DP) = 0.
inline double dark_port_offset(const MirrorParams& membrane, const BeamsplitterParams& bs,
                               double wavelength, int n) {
    return wavelength * dark_port_fraction(membrane, bs, n);
}

/// Carrier reflectance of the effective mirror at the dark port, arg rho2|_DP.
inline double dark_port_phase(const InterferometerConfig& cfg) {
    const double theta = two_pi * dark_port_fraction(cfg.membrane, cfg.beamsplitter, cfg.dark_port_index);
    return std::arg(effective_mirror_scalars(cfg.membrane, cfg.beamsplitter, theta).rho2);
}

/// Optical layout realizing the operating point: dl = dl_DP + xi and the SR
/// carrier tuning 2 k0 L_cav = 2 delta_SR L_cav / c - arg rho2|_DP.
inline OpticalLayout optical_layout(const InterferometerConfig& cfg) {
    cfg.validate();
    OpticalLayout layout;
    layout.geometry.arm_length = cfg.arm_length;
    layout.geometry.half_arm = cfg.half_arm;
    layout.geometry.sr_distance = cfg.sr_distance;
    layout.geometry.wavelength = cfg.wavelength;
    layout.geometry.arm_imbalance =
        dark_port_offset(cfg.membrane, cfg.beamsplitter, cfg.wavelength, cfg.dark_port_index) + cfg.offset;
    layout.geometry.tuning_phase =
        2.0 * cfg.srm_detuning * cfg.cavity_length() / speed_of_light - dark_port_phase(cfg);
    layout.geometry.validate();
    layout.membrane = cfg.membrane;
    layout.srm = cfg.srm;
    layout.beamsplitter = cfg.beamsplitter;
    layout.imbalance = cfg.imbalance;
    return layout;
}

/// Single-mode description of the recycled interferometer (all rates in rad/s).
struct EffectiveCavity {
    double detuning = 0.0;          // Delta = delta_SR + delta_m
    double srm_detuning = 0.0;      // delta_SR
    double membrane_detuning = 0.0; // delta_m = (c / 2L) dphi
    double linewidth = 0.0;         // gamma = gamma_SR + gamma_m (narrow band)
    double linewidth_exact = 0.0;   // c (1 - R_SR |rho2|) / 2L
    double srm_linewidth = 0.0;     // gamma_SR = c T_SR^2 / 4L
    double membrane_linewidth = 0.0;// gamma_m = c |tau|^2 / 4L
    double carrier_frequency = 0.0; // omega0
    double cavity_frequency = 0.0;  // omega_cav = omega0 - delta_SR
    double phase_offset = 0.0;      // dphi = arg rho2 - arg rho2|_DP
    std::vector<std::string> warnings;

    /// Same cavity at another total detuning (the SRM moves, the membrane does not).
    EffectiveCavity detuned(double total_detuning) const {
        EffectiveCavity out = *this;
        out.detuning = total_detuning;
        out.srm_detuning = total_detuning - membrane_detuning;
        out.cavity_frequency = carrier_frequency - out.srm_detuning;
        return out;
    }
};

namespace detail {

/// arg rho2(xi) - arg rho2(0), unwrapped continuously along the straight path from the dark port.
inline double unwrapped_phase_offset(const InterferometerConfig& cfg) {
    constexpr int steps = 64;
    const double theta_dp = two_pi * dark_port_fraction(cfg.membrane, cfg.beamsplitter, cfg.dark_port_index);
    const double dtheta = cfg.carrier_wavenumber() * cfg.offset;
    Complex prev = effective_mirror_scalars(cfg.membrane, cfg.beamsplitter, theta_dp).rho2;
    double total = 0.0;
    for (int j = 1; j <= steps; ++j) {
        const double theta = theta_dp + dtheta * (static_cast<double>(j) / steps);
        const Complex next = effective_mirror_scalars(cfg.membrane, cfg.beamsplitter, theta).rho2;
        total += std::arg(next * std::conj(prev));
        prev = next;
    }
    return total;
}

} // namespace detail

inline EffectiveCavity effective_cavity(const InterferometerConfig& cfg) {
    const OpticalLayout layout = optical_layout(cfg);
    const PathPhases ph = path_phases(layout.geometry, 0.0, layout.imbalance);
    const MirrorScalars s = effective_mirror_scalars(cfg.membrane, cfg.beamsplitter, ph.imbalance);
    const double len = cfg.cavity_length();
    const double c = speed_of_light;
    const double t_sr2 = cfg.srm.transmissivity * cfg.srm.transmissivity;
    const double tau2 = std::norm(s.tau);

    EffectiveCavity e;
    e.srm_linewidth = c * t_sr2 / (4.0 * len);
    e.membrane_linewidth = c * tau2 / (4.0 * len);
    e.linewidth = e.srm_linewidth + e.membrane_linewidth;
    e.linewidth_exact = c * (1.0 - cfg.srm.reflectivity * std::abs(s.rho2)) / (2.0 * len);
    e.phase_offset = detail::unwrapped_phase_offset(cfg);
    e.membrane_detuning = c / (2.0 * len) * e.phase_offset;
    e.srm_detuning = cfg.srm_detuning;
    e.detuning = e.srm_detuning + e.membrane_detuning;
    e.carrier_frequency = cfg.carrier_frequency();
    e.cavity_frequency = e.carrier_frequency - e.srm_detuning;

    if (t_sr2 > 0.1) e.warnings.emplace_back("T_SR^2 > 0.1: outside the narrow-band regime");
    if (tau2 > 0.1) e.warnings.emplace_back("|tau|^2 > 0.1: outside the narrow-band regime");
    if (std::abs(cfg.offset) >= cfg.wavelength / 8.0)
        e.warnings.emplace_back("|xi| >= lambda0/8: not near the dark fringe");
    return e;
}

/// Copy of cfg with the SRM placed so that the total detuning equals `detuning`.
inline InterferometerConfig with_total_detuning(const InterferometerConfig& cfg, double detuning) {
    InterferometerConfig out = cfg;
    out.srm_detuning = detuning - effective_cavity(cfg).membrane_detuning;
    return out;
}

/// Leading-order (in k0*xi) linewidth and detuning shifts for a balanced beamsplitter.
struct SmallOffsetExpansion {
    double membrane_linewidth = 0.0; // c R_m^2 (k0 xi)^2 / 4L
    double membrane_detuning = 0.0;  // sign * c R_m T_m (k0 xi)^2 / 4L
    int sign = 1;                    // +1 for n = 1, 5, 9, ...; -1 for n = 3, 7, ...
};

inline SmallOffsetExpansion small_offset_expansion(const InterferometerConfig& cfg) {
    if (!cfg.beamsplitter.balanced())
        throw std::invalid_argument("small-offset expansion requires a balanced beamsplitter");
    cfg.validate();
    const double phase = cfg.carrier_wavenumber() * cfg.offset;
    const double scale = speed_of_light * phase * phase / (4.0 * cfg.cavity_length());
    SmallOffsetExpansion out;
    out.sign = cfg.dark_port_index % 4 == 1 ? 1 : -1;
    out.membrane_linewidth = scale * cfg.membrane.reflectivity * cfg.membrane.reflectivity;
    out.membrane_detuning = out.sign * scale * cfg.membrane.reflectivity * cfg.membrane.transmissivity;
    return out;
}

/// Offset xi in [0, lambda0/8] at which the exact membrane linewidth equals target [rad/s].
inline double offset_for_membrane_linewidth(InterferometerConfig cfg, double target) {
    if (!(target >= 0.0)) throw std::invalid_argument("target linewidth must be non-negative");
    if (target == 0.0) return 0.0;
    auto excess = [&](double xi) {
        cfg.offset = xi;
        return effective_cavity(cfg).membrane_linewidth - target;
    };
    const double hi = cfg.wavelength / 8.0;
    const auto roots = find_zero_crossings(excess, 0.0, hi, 257, 1e-15 * hi);
    if (roots.empty()) throw std::invalid_argument("target linewidth not reachable within lambda0/8");
    return roots.front();
}

} // namespace ospring

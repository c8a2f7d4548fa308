#pragma once

// Element, propagation and composite transfer matrices of the signal-recycled
// Michelson-Sagnac interferometer in the frequency domain.
//
// Field vectors are (laser port, detector port). A sideband at frequency omega
// propagates with wavenumber k = k0 + omega/c. The carrier phase of a macroscopic
// length is hypersensitive to that length, so the geometry carries the carrier
// round-trip phase 2*k0*L_cav of the recycling path separately (tuning_phase);
// macroscopic lengths only enter through the sideband part omega*length/c.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "ospring/constants.hpp"
#include "ospring/error.hpp"
#include "ospring/two_port.hpp"

namespace ospring {

/// Lossless mirror, amplitude coefficients.
struct MirrorParams {
    double reflectivity = 1.0;   // r
    double transmissivity = 0.0; // t

    static MirrorParams from_power_reflectivity(double r2) {
        if (!(r2 >= 0.0 && r2 <= 1.0))
            throw std::invalid_argument("power reflectivity must lie in [0, 1]");
        return {std::sqrt(r2), std::sqrt(1.0 - r2)};
    }
    static MirrorParams from_power_transmissivity(double t2) {
        if (!(t2 >= 0.0 && t2 <= 1.0))
            throw std::invalid_argument("power transmissivity must lie in [0, 1]");
        return {std::sqrt(1.0 - t2), std::sqrt(t2)};
    }

    void validate() const {
        if (reflectivity < 0.0 || transmissivity < 0.0)
            throw std::invalid_argument("mirror amplitudes must be non-negative");
        if (std::abs(reflectivity * reflectivity + transmissivity * transmissivity - 1.0) >= 1e-12)
            throw std::invalid_argument("mirror is not lossless: r^2 + t^2 != 1");
    }
};

/// Beamsplitter described by its asymmetry; R = sqrt((1-d)/2), T = sqrt((1+d)/2).
struct BeamsplitterParams {
    double asymmetry = 0.0;

    double reflectivity() const { return std::sqrt((1.0 - asymmetry) / 2.0); }
    double transmissivity() const { return std::sqrt((1.0 + asymmetry) / 2.0); }
    bool balanced() const { return asymmetry == 0.0; }

    void validate() const {
        if (!(asymmetry >= -1.0 && asymmetry <= 1.0))
            throw std::invalid_argument("beamsplitter asymmetry must lie in [-1, 1]");
    }
};

struct Geometry {
    double arm_length = 0.0;     // L [m]
    double half_arm = 0.0;       // l: mean BS-membrane half path [m]
    double sr_distance = 0.0;    // l_SR [m]
    double wavelength = 0.0;     // lambda0 [m]
    double arm_imbalance = 0.0;  // dl = l2 - l1 [m]
    /// Carrier round-trip phase 2*k0*(L + l + l_SR) modulo 2*pi. Unset: derived from the lengths.
    std::optional<double> tuning_phase;

    double cavity_length() const { return arm_length + half_arm + sr_distance; }
    double carrier_wavenumber() const { return two_pi / wavelength; }
    double half_arm_1() const { return half_arm - arm_imbalance / 2.0; }
    double half_arm_2() const { return half_arm + arm_imbalance / 2.0; }

    void validate() const {
        if (!(arm_length > 0.0) || !(half_arm > 0.0) || !(sr_distance > 0.0) || !(wavelength > 0.0))
            throw std::invalid_argument("lengths and wavelength must be positive");
        if (!(half_arm_1() > 0.0) || !(half_arm_2() > 0.0))
            throw std::invalid_argument("arm imbalance exceeds the half-arm length");
    }
};

/// Whether sideband phases include the (omega/c)*dl correction of the arm imbalance.
enum class ImbalancePhase { exact, carrier_only };

struct OpticalLayout {
    Geometry geometry;
    MirrorParams membrane;
    MirrorParams srm;
    BeamsplitterParams beamsplitter;
    ImbalancePhase imbalance = ImbalancePhase::exact;
};

namespace detail {

inline double reduce_phase(double x) { return std::remainder(x, two_pi); }

inline Complex unit_phasor(double phase) { return std::polar(1.0, phase); }

} // namespace detail

/// Accumulated one-way phases along each path segment at sideband frequency omega.
struct PathPhases {
    double arm = 0.0;        // k*L
    double half_arm_1 = 0.0; // k*l1
    double half_arm_2 = 0.0; // k*l2
    double sr = 0.0;         // k*l_SR (tuned carrier part)
    double imbalance = 0.0;  // k*dl

    /// 2k(L + l + l_SR)
    double round_trip() const { return 2.0 * arm + half_arm_1 + half_arm_2 + 2.0 * sr; }
    /// 2k(L + l)
    double msi_common() const { return 2.0 * arm + half_arm_1 + half_arm_2; }
};

inline PathPhases path_phases(const Geometry& g, double omega,
                              ImbalancePhase imbalance = ImbalancePhase::exact) {
    const double k0 = g.carrier_wavenumber();
    const double ks = omega / speed_of_light;
    const double arm_carrier = detail::reduce_phase(k0 * g.arm_length);
    const double half_carrier = detail::reduce_phase(k0 * g.half_arm);
    const double sr_carrier = g.tuning_phase
                                  ? *g.tuning_phase / 2.0 - arm_carrier - half_carrier
                                  : detail::reduce_phase(k0 * g.sr_distance);

    PathPhases p;
    p.imbalance = k0 * g.arm_imbalance +
                  (imbalance == ImbalancePhase::exact ? ks * g.arm_imbalance : 0.0);
    const double mean = half_carrier + ks * g.half_arm;
    p.arm = arm_carrier + ks * g.arm_length;
    p.half_arm_1 = mean - p.imbalance / 2.0;
    p.half_arm_2 = mean + p.imbalance / 2.0;
    p.sr = sr_carrier + ks * g.sr_distance;
    return p;
}

// ---------------------------------------------------------------------------
// Element matrices
// ---------------------------------------------------------------------------

inline TwoPortMatrix beamsplitter_matrix(const BeamsplitterParams& bs) {
    const double r = bs.reflectivity();
    const double t = bs.transmissivity();
    return {t, -r, r, t};
}

inline TwoPortMatrix membrane_matrix(const MirrorParams& m) {
    return {-m.reflectivity, m.transmissivity, m.transmissivity, m.reflectivity};
}

struct PropagationMatrices {
    TwoPortMatrix arms;      // P_L
    TwoPortMatrix half_arms; // P_l
    TwoPortMatrix sr_path;   // P_R
};

inline PropagationMatrices propagation_matrices(const Geometry& g, double omega,
                                                ImbalancePhase imbalance = ImbalancePhase::exact) {
    const PathPhases p = path_phases(g, omega, imbalance);
    using detail::unit_phasor;
    return {TwoPortMatrix::diagonal(unit_phasor(p.arm), unit_phasor(p.arm)),
            TwoPortMatrix::diagonal(unit_phasor(p.half_arm_1), unit_phasor(p.half_arm_2)),
            TwoPortMatrix::diagonal(1.0, unit_phasor(p.sr))};
}

// ---------------------------------------------------------------------------
// Non-recycled interferometer as an effective mirror
// ---------------------------------------------------------------------------

struct EffectiveMirror {
    TwoPortMatrix transfer; // M_MS = BS^T P_L P_l M_m P_l P_L BS
    Complex rho1;           // laser port back into laser port
    Complex rho2;           // detector port back into detector port
    Complex tau;            // cross transmittance
    Complex common_phase;   // e^{2ik(L+l)}
};

/// Reflectance / transmittance scalars of the effective mirror for a phase k*dl.
struct MirrorScalars {
    Complex rho1, rho2, tau;
};

inline MirrorScalars effective_mirror_scalars(const MirrorParams& m, const BeamsplitterParams& bs,
                                              double imbalance_phase) {
    const double rb = bs.reflectivity();
    const double tb = bs.transmissivity();
    const double rm = m.reflectivity;
    const double tm = m.transmissivity;
    const Complex e = detail::unit_phasor(imbalance_phase);
    const Complex ei = std::conj(e);
    return {rm * (rb * rb * e - tb * tb * ei) + 2.0 * tm * rb * tb,
            rm * (tb * tb * e - rb * rb * ei) - 2.0 * tm * rb * tb,
            rm * rb * tb * (e + ei) + tm * (tb * tb - rb * rb)};
}

inline EffectiveMirror msi_matrix(const OpticalLayout& layout, double omega) {
    const PropagationMatrices p = propagation_matrices(layout.geometry, omega, layout.imbalance);
    const TwoPortMatrix bs = beamsplitter_matrix(layout.beamsplitter);
    const TwoPortMatrix leg = p.half_arms * p.arms * bs;
    const TwoPortMatrix transfer = bs.transpose() * p.arms * p.half_arms *
                                   membrane_matrix(layout.membrane) * leg;

    const PathPhases ph = path_phases(layout.geometry, omega, layout.imbalance);
    const MirrorScalars s = effective_mirror_scalars(layout.membrane, layout.beamsplitter, ph.imbalance);
    return {transfer, s.rho1, s.rho2, s.tau, detail::unit_phasor(ph.msi_common())};
}

// ---------------------------------------------------------------------------
// Signal recycling
// ---------------------------------------------------------------------------

struct Resolvent {
    TwoPortMatrix matrix;   // K_MSR = (I - P_R R_R P_R M_MS)^{-1}
    Complex inverse_factor; // D = 1 - R_SR rho2 e^{2ikL_cav}
    Complex round_trip;     // e^{2ikL_cav}
};

/// I - P_R R_R P_R M_MS, the operator whose inverse is the recycling resolvent.
inline TwoPortMatrix recycling_operator(const OpticalLayout& layout, double omega) {
    const PropagationMatrices p = propagation_matrices(layout.geometry, omega, layout.imbalance);
    const TwoPortMatrix rr = TwoPortMatrix::diagonal(0.0, layout.srm.reflectivity);
    return TwoPortMatrix::identity() -
           p.sr_path * rr * p.sr_path * msi_matrix(layout, omega).transfer;
}

/// Closed-form resolvent. Throws DegenerateResonance when |D| < 1e-14.
inline Resolvent recycling_resolvent(const OpticalLayout& layout, double omega) {
    const PathPhases ph = path_phases(layout.geometry, omega, layout.imbalance);
    const MirrorScalars s = effective_mirror_scalars(layout.membrane, layout.beamsplitter, ph.imbalance);
    const Complex round_trip = detail::unit_phasor(ph.round_trip());
    const double r_sr = layout.srm.reflectivity;
    const Complex d = 1.0 - r_sr * s.rho2 * round_trip;
    if (std::abs(d) < 1e-14) throw DegenerateResonance(std::abs(d));
    const Complex inv = 1.0 / d;
    return {{1.0, 0.0, inv * r_sr * s.tau * round_trip, inv}, d, round_trip};
}

struct MembraneFieldMatrices {
    TwoPortMatrix incident;  // M_A: input fields -> fields incident on the membrane faces
    TwoPortMatrix reflected; // M_B = M_m M_A
    TwoPortMatrix motion;    // M_ax: feedback of motion-induced sidebands through the SR loop
};

/// M_A, M_B, M_ax at sideband frequency omega (omega = 0 gives the mean-field matrices).
inline MembraneFieldMatrices membrane_field_matrices(const OpticalLayout& layout, double omega) {
    const PropagationMatrices p = propagation_matrices(layout.geometry, omega, layout.imbalance);
    const TwoPortMatrix bs = beamsplitter_matrix(layout.beamsplitter);
    const TwoPortMatrix mm = membrane_matrix(layout.membrane);
    const TwoPortMatrix resolvent = recycling_resolvent(layout, omega).matrix;
    const TwoPortMatrix to_membrane = p.half_arms * p.arms * bs * resolvent;
    const TwoPortMatrix input = p.sr_path * TwoPortMatrix::diagonal(1.0, layout.srm.transmissivity);
    const TwoPortMatrix loop = p.sr_path * TwoPortMatrix::diagonal(0.0, layout.srm.reflectivity) *
                              p.sr_path * bs.transpose() * p.arms * p.half_arms;

    const TwoPortMatrix incident = to_membrane * input;
    return {incident, mm * incident,
            Complex(layout.membrane.reflectivity) * (to_membrane * loop)};
}

} // namespace ospring

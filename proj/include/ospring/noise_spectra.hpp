#pragma once

// Unsymmetrized spectral density of the radiation-pressure (back-action) noise
// force on the membrane, split into the contributions of the vacuum entering
// through the laser port and through the detector port.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ospring/cavity_model.hpp"
#include "ospring/parallel.hpp"
#include "ospring/transfer_optics.hpp"

namespace ospring {

struct NoiseSpectrum {
    std::vector<double> omega;         // rad/s, signed
    std::vector<double> s_f;           // N^2 s
    std::vector<double> laser_part;    // laser-port vacuum (Fano-shaped)
    std::vector<double> detector_part; // detector-port vacuum (Lorentzian)

    std::size_t size() const { return omega.size(); }
};

namespace detail {

/// Mean field incident on the two membrane faces for the laser drive (A_L0, 0).
inline FieldPair mean_incident_field(const InterferometerConfig& cfg, const OpticalLayout& layout) {
    const double amplitude = std::sqrt(cfg.input_power / (reduced_planck * cfg.carrier_frequency()));
    const FieldPair drive{std::polar(amplitude, cfg.laser_phase), 0.0};
    return membrane_field_matrices(layout, 0.0).incident * drive;
}

inline NoiseSpectrum allocate_spectrum(std::span<const double> grid) {
    NoiseSpectrum out;
    out.omega.assign(grid.begin(), grid.end());
    out.s_f.resize(grid.size());
    out.laser_part.resize(grid.size());
    out.detector_part.resize(grid.size());
    return out;
}

} // namespace detail

/// S_F on a frequency grid by propagating the vacuum inputs to the membrane
/// faces: S_F = 4 hbar^2 k0^2 R_m^2 sum_j |A_m0^H M_b(omega) e_j|^2.
/// Honors cfg.imbalance: exact keeps the (omega/c) dl sideband phase.
inline NoiseSpectrum back_action_spectrum(const InterferometerConfig& cfg, std::span<const double> grid) {
    const OpticalLayout layout = optical_layout(cfg);
    const FieldPair mean = detail::mean_incident_field(cfg, layout);
    const double coupling = 2.0 * reduced_planck * cfg.carrier_wavenumber() * cfg.membrane.reflectivity;
    const double scale = coupling * coupling;

    NoiseSpectrum out = detail::allocate_spectrum(grid);
    parallel_for(grid.size(), [&](std::size_t i) {
        const TwoPortMatrix reflected = membrane_field_matrices(layout, grid[i]).reflected;
        const double laser = scale * std::norm(inner(mean, reflected.column(0)));
        const double detector = scale * std::norm(inner(mean, reflected.column(1)));
        out.laser_part[i] = laser;
        out.detector_part[i] = detector;
        out.s_f[i] = laser + detector;
    });
    return out;
}

/// S_F from the closed-form laser-port / detector-port amplitudes
///   S_F = (4 hbar k0 / c) R_m^2 P_in / |D0 D(omega)|^2 { |L(omega)|^2 + T_SR^2 |Dd(omega)|^2 },
/// which keep only the carrier phase k0*dl of the arm imbalance.
inline NoiseSpectrum back_action_spectrum_closed_form(const InterferometerConfig& cfg,
                                                      std::span<const double> grid) {
    const OpticalLayout layout = optical_layout(cfg);
    const double theta = path_phases(layout.geometry, 0.0, ImbalancePhase::carrier_only).imbalance;
    const Complex e = std::polar(1.0, theta);
    const Complex ei = std::conj(e);
    const Complex carrier_round_trip = std::polar(1.0, *layout.geometry.tuning_phase);

    const double rb = cfg.beamsplitter.reflectivity();
    const double tb = cfg.beamsplitter.transmissivity();
    const double rm = cfg.membrane.reflectivity;
    const double tm = cfg.membrane.transmissivity;
    const double r_sr = cfg.srm.reflectivity;
    const double t_sr = cfg.srm.transmissivity;

    const Complex alpha1 = tm * rb * tb * (e + ei) - rm * (tb * tb - rb * rb);
    const Complex alpha2 = tb * tb * e + rb * rb * ei;
    const Complex beta1 = tm * (tb * tb * e - rb * rb * ei) + 2.0 * rm * rb * tb;
    const Complex beta2 = rb * tb * (e - ei);
    const Complex rho2 = effective_mirror_scalars(cfg.membrane, cfg.beamsplitter, theta).rho2;
    const Complex d0 = 1.0 - r_sr * rho2 * carrier_round_trip;
    if (std::abs(d0) < 1e-14) throw DegenerateResonance(std::abs(d0));

    const double prefactor = 4.0 * reduced_planck * cfg.carrier_wavenumber() / speed_of_light * rm * rm *
                             cfg.input_power;
    const double len = cfg.cavity_length();

    NoiseSpectrum out = detail::allocate_spectrum(grid);
    parallel_for(grid.size(), [&](std::size_t i) {
        const Complex sideband_round_trip = std::polar(1.0, 2.0 * grid[i] * len / speed_of_light);
        const Complex d = 1.0 - r_sr * rho2 * carrier_round_trip * sideband_round_trip;
        if (std::abs(d) < 1e-14) throw DegenerateResonance(std::abs(d));
        const Complex laser_amp = alpha1 * (1.0 + r_sr * r_sr * sideband_round_trip) +
                                  alpha2 * r_sr * carrier_round_trip * sideband_round_trip +
                                  std::conj(alpha2) * r_sr * std::conj(carrier_round_trip);
        const Complex detector_amp = beta1 + beta2 * r_sr * std::conj(carrier_round_trip);
        const double weight = prefactor / std::norm(d0 * d);
        out.laser_part[i] = weight * std::norm(laser_amp);
        out.detector_part[i] = weight * t_sr * t_sr * std::norm(detector_amp);
        out.s_f[i] = out.laser_part[i] + out.detector_part[i];
    });
    return out;
}

/// All three curves divided by max(s_f); the decomposition still closes.
inline NoiseSpectrum normalized(NoiseSpectrum s) {
    const double peak = s.s_f.empty() ? 0.0 : *std::max_element(s.s_f.begin(), s.s_f.end());
    if (peak > 0.0) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            s.s_f[i] /= peak;
            s.laser_part[i] /= peak;
            s.detector_part[i] /= peak;
        }
    }
    return s;
}

/// S_F(omega) - S_F(-omega), both evaluated by direct substitution of the signed frequency.
inline double spectral_asymmetry(const InterferometerConfig& cfg, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("spectral_asymmetry: omega must be positive");
    const double grid[2] = {omega, -omega};
    const NoiseSpectrum s = back_action_spectrum(cfg, grid);
    return s.s_f[0] - s.s_f[1];
}

} // namespace ospring

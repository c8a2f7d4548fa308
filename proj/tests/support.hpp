#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "ospring/ospring.hpp"

namespace testing {

using ospring::Complex;
using ospring::InterferometerConfig;

/// Signal-recycled MSI 0.01 lambda0 off the 3 lambda0/4 dark port.
inline InterferometerConfig fig2() {
    InterferometerConfig c;
    c.dark_port_index = 3;
    c.offset = 0.01 * c.wavelength;
    return c;
}

/// Michelson limit with gamma_m = ratio * gamma_SR, gamma_SR from T_SR^2 = 1e-3.
inline InterferometerConfig michelson(double ratio) {
    InterferometerConfig c;
    c.membrane = ospring::MirrorParams::from_power_reflectivity(1.0);
    c.srm = ospring::MirrorParams::from_power_transmissivity(1e-3);
    c.dark_port_index = 1;
    c.offset = std::asin(std::sqrt(ratio * 1e-3)) / ospring::two_pi * c.wavelength;
    return c;
}

inline double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }
inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

/// Random lossless operating point with an existing dark port.
inline InterferometerConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    InterferometerConfig c;
    for (;;) {
        c.membrane = ospring::MirrorParams::from_power_reflectivity(0.05 + 0.9 * u(rng));
        c.beamsplitter.asymmetry = -0.6 + 1.2 * u(rng);
        const double t = c.membrane.transmissivity, r = c.membrane.reflectivity, d = c.beamsplitter.asymmetry;
        if (std::abs(t / r * d / std::sqrt(1.0 - d * d)) < 0.95) break;
    }
    c.srm = ospring::MirrorParams::from_power_transmissivity(1e-4 + 0.3 * u(rng));
    c.arm_length = 0.01 + 0.1 * u(rng);
    c.half_arm = 0.01 + 0.05 * u(rng);
    c.sr_distance = 0.005 + 0.05 * u(rng);
    c.input_power = 0.01 + u(rng);
    c.dark_port_index = 1 + 2 * static_cast<int>(4 * u(rng));
    c.offset = (u(rng) - 0.5) * 0.1 * c.wavelength;
    c.srm_detuning = (u(rng) - 0.5) * 2e6;
    c.laser_phase = ospring::two_pi * u(rng);
    return c;
}

} // namespace testing

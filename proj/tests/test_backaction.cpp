#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace ospring;
using testing::fig2;
using testing::rel;

namespace {

/// Mean radiation-pressure force on the membrane from the photon fluxes on both faces.
double dc_force(const InterferometerConfig& c) {
    const OpticalLayout l = optical_layout(c);
    const MembraneFieldMatrices f = membrane_field_matrices(l, 0.0);
    const double amplitude = std::sqrt(c.input_power / (reduced_planck * c.carrier_frequency()));
    const FieldPair drive{amplitude, 0.0};
    const FieldPair a = f.incident * drive;
    const FieldPair b = f.reflected * drive;
    return reduced_planck * c.carrier_frequency() / speed_of_light *
           (std::norm(a.first) + std::norm(b.first) - std::norm(a.second) - std::norm(b.second));
}

/// Static spring -dF/dx. Face-1 light pushes the membrane along x, which lengthens l1: d(dl)/dx = -2.
double dc_spring(InterferometerConfig c, double h) {
    const double x0 = c.offset;
    c.offset = x0 + h;
    const double fp = dc_force(c);
    c.offset = x0 - h;
    const double fm = dc_force(c);
    return 2.0 * (fp - fm) / (2.0 * h);
}

} // namespace

TEST_CASE("no power, no back-action") {
    InterferometerConfig c = fig2();
    c.input_power = 0.0;
    const ExactKernel k(c);
    for (double w : {0.0, 1e5, 1e6}) CHECK(k(w) == Complex(0.0));
    const EffectiveCavity e = effective_cavity(c);
    CHECK(kernel_narrowband(e, KernelScale::of(c), 1e5) == Complex(0.0));
}

TEST_CASE("without recycling the kernel reduces to the static membrane force gradient") {
    InterferometerConfig c = fig2();
    c.srm = MirrorParams::from_power_reflectivity(0.0);
    const double kdl = two_pi / c.wavelength *
                       (dark_port_offset(c.membrane, c.beamsplitter, c.wavelength, c.dark_port_index) + c.offset);
    const double expected = 8.0 * c.carrier_wavenumber() / speed_of_light * c.membrane.reflectivity *
                            c.membrane.transmissivity * c.beamsplitter.reflectivity() *
                            c.beamsplitter.transmissivity() * c.input_power * std::sin(kdl);
    const ExactKernel k(c);
    for (double w : {1e3, 1e5, 1e7}) {
        const Complex kw = k(w);
        CHECK(rel(kw.real(), expected) < 1e-6);
        CHECK(std::abs(kw.imag()) < 1e-6 * std::abs(kw.real()));
    }
    CHECK(rel(k(1e3).real(), dc_spring(c, 1e-13)) < 1e-5);
}

TEST_CASE("static spring matches the gradient of the mean force") {
    for (double d : {-1.0, -0.3, 0.5}) {
        const InterferometerConfig base = fig2();
        const InterferometerConfig c = with_total_detuning(base, d * effective_cavity(base).linewidth);
        CHECK(rel(kernel_exact(c, 0.0).real(), dc_spring(c, 1e-14)) < 1e-4);
    }
}

TEST_CASE("exact kernel against the single-mode kernel") {
    SECTION("desk-top regime within 5 percent") {
        const InterferometerConfig base = fig2();
        const EffectiveCavity cav = effective_cavity(base);
        const double g = cav.linewidth;
        const KernelScale scale = KernelScale::of(base);
        double worst = 0.0;
        for (int i = 0; i <= 12; ++i) {
            const double d = (-3.0 + 0.5 * i) * g;
            const ExactKernel k(with_total_detuning(base, d));
            for (int j = 0; j <= 9; ++j) {
                const double w = (0.1 + 0.29 * j) * g;
                worst = std::max(worst, rel(k(w), kernel_narrowband(cav.detuned(d), scale, w)));
            }
        }
        CHECK(worst < 0.05);
    }
    SECTION("deep narrow-band regime within 0.5 percent") {
        InterferometerConfig base = fig2();
        base.srm = MirrorParams::from_power_transmissivity(5e-5);
        base.offset = 0.002 * base.wavelength;
        const EffectiveCavity cav = effective_cavity(base);
        REQUIRE(cav.membrane_linewidth * 4.0 * base.cavity_length() / speed_of_light < 1e-4);
        const double g = cav.linewidth;
        const KernelScale scale = KernelScale::of(base);
        double worst = 0.0;
        for (double d : {-0.45, -0.2, 0.1, 0.4})
            for (double w : {0.05, 0.2, 0.45}) {
                const ExactKernel k(with_total_detuning(base, d * g));
                worst = std::max(worst, rel(k(w * g), kernel_narrowband(cav.detuned(d * g), scale, w * g)));
            }
        CHECK(worst < 0.005);
    }
}

TEST_CASE("single-mode kernel limits") {
    InterferometerConfig c = fig2();
    c.offset = 0.0;
    const EffectiveCavity e0 = effective_cavity(c);
    const KernelScale scale = KernelScale::of(c);
    const double a = scale.prefactor();
    const double g = e0.linewidth;
    SECTION("canonical detuned cavity on the dark port") {
        for (double d : {-1.3 * g, 0.4 * g}) {
            const EffectiveCavity e = e0.detuned(d);
            for (double w : {0.2 * g, 2.0 * g}) {
                const Complex canonical = a * d / (d * d + Complex(g, -w) * Complex(g, -w));
                CHECK(rel(kernel_narrowband(e, scale, w), canonical) < 1e-12);
            }
            const SpringDamping sd = extract_spring_damping(
                [&](double w) { return kernel_narrowband(e, scale, w); }, 0.0, g);
            CHECK(rel(sd.spring, a * d / (g * g + d * d)) < 1e-12);
            CHECK(rel(sd.damping, -a * g * d / ((g * g + d * d) * (g * g + d * d))) < 1e-8);
        }
    }
    SECTION("off the dark port the damping survives on resonance") {
        const InterferometerConfig off = fig2();
        const EffectiveCavity e = effective_cavity(off).detuned(0.0);
        const double w = e.linewidth;
        const Complex k = kernel_narrowband(e, KernelScale::of(off), w);
        CHECK(std::abs(damping_from_kernel(k, w)) > 0.0);
        const double dm = e.membrane_detuning;
        const Complex braces = -dm * (e.linewidth * e.linewidth - 4.0 * e.linewidth * e.membrane_linewidth) +
                               Complex(0.0, 2.0 * (e.srm_linewidth - e.membrane_linewidth) * dm * w) + dm * w * w;
        const Complex expected = KernelScale::of(off).prefactor() / (Complex(e.linewidth, -w) * Complex(e.linewidth, -w)) *
                                 braces / (e.linewidth * e.linewidth);
        CHECK(rel(k, expected) < 1e-12);
    }
}

TEST_CASE("free-mass spring and damping") {
    InterferometerConfig c = testing::michelson(1.0);
    const EffectiveCavity e = effective_cavity(c);
    const KernelScale scale = KernelScale::of(c);
    const double g = e.linewidth;
    REQUIRE(rel(e.membrane_linewidth, g / 2.0) < 1e-3);
    const SpringDamping zero = free_mass_spring_damping(e, scale, 0.0);
    CHECK(zero.spring == 0.0);
    CHECK(zero.damping == 0.0);

    EffectiveCavity half = e;
    half.membrane_linewidth = g / 2.0;
    half.srm_linewidth = g / 2.0;
    auto k = [&](double d) { return free_mass_spring_damping(half, scale, d).spring; };
    auto gd = [&](double d) { return free_mass_spring_damping(half, scale, d).damping; };
    const auto kz = find_zero_crossings(k, -3.0 * g, 3.0 * g, 6001, 1e-12 * g);
    const auto gz = find_zero_crossings(gd, -3.0 * g, 3.0 * g, 6001, 1e-12 * g);
    REQUIRE(kz.size() == 3);
    CHECK(std::abs(kz[0] + g) < 1e-9 * g);
    CHECK(std::abs(kz[1]) < 1e-9 * g);
    CHECK(std::abs(kz[2] - g) < 1e-9 * g);
    REQUIRE(gz.size() == 3);
    CHECK(std::abs(gz[0] + g / std::sqrt(3.0)) < 1e-9 * g);
    CHECK(std::abs(gz[2] - g / std::sqrt(3.0)) < 1e-9 * g);

    SECTION("general zero locations") {
        for (double ratio : {0.3, 0.4, 0.45}) {
            EffectiveCavity x = e;
            x.membrane_linewidth = ratio * g;
            x.srm_linewidth = (1.0 - ratio) * g;
            const auto z = find_zero_crossings([&](double d) { return free_mass_spring_damping(x, scale, d).spring; },
                                               -3.0 * g, 3.0 * g, 6001, 1e-12 * g);
            REQUIRE(z.size() == 3);
            CHECK(rel(z[2], g * std::sqrt(4.0 * ratio - 1.0)) < 1e-8);
            const auto zg = find_zero_crossings(
                [&](double d) { return free_mass_spring_damping(x, scale, d).damping; }, -3.0 * g, 3.0 * g, 6001,
                1e-12 * g);
            if (ratio > 1.0 / 3.0) {
                REQUIRE(zg.size() == 3);
                CHECK(rel(zg[2], g * std::sqrt((3.0 * ratio - 1.0) / (1.0 + ratio))) < 1e-8);
            } else {
                CHECK(zg.size() == 1);
            }
        }
    }
}

TEST_CASE("single-mode kernel at low frequency reproduces the free-mass limit") {
    InterferometerConfig c = testing::michelson(0.75);
    const EffectiveCavity base = effective_cavity(c);
    const KernelScale scale = KernelScale::of(c);
    const double g = base.linewidth;
    EffectiveCavity e = base;
    e.membrane_detuning = 0.0;
    for (double d : {-2.0, -0.7, -0.2, 0.3, 1.1}) {
        const EffectiveCavity x = [&] {
            EffectiveCavity y = e;
            y.detuning = d * g;
            y.srm_detuning = d * g;
            return y;
        }();
        const double w = 1e-6 * g;
        const Complex k = kernel_narrowband(x, scale, w);
        const SpringDamping fm = free_mass_spring_damping(x, scale, d * g);
        CHECK(rel(k.real(), fm.spring) < 1e-4);
        CHECK(rel(damping_from_kernel(k, w), fm.damping) < 1e-3);
    }
}

TEST_CASE("static damping by Richardson extrapolation") {
    // -1/2 d/dw Im(a w + b w^3) = -a/2; the cubic term must be extrapolated away.
    auto k = [](double w) { return Complex(1.0, 3.0 * w + 5e6 * w * w * w); };
    CHECK(std::abs(static_damping(k, 1e-3) + 1.5) < 1e-9);
    CHECK_THROWS(damping_from_kernel(Complex(1.0, 1.0), 0.0));
    CHECK(damping_from_kernel(Complex(0.0, -4.0), 2.0) == 1.0);
    CHECK(spring_from_kernel(Complex(3.0, 4.0)) == 3.0);
}

TEST_CASE("exact kernel reality structure") {
    const InterferometerConfig c = with_total_detuning(fig2(), -8e4);
    const ExactKernel k(c);
    for (double w : {1e4, 3e5, 2e6}) CHECK(rel(k(-w), std::conj(k(w))) < 1e-12);
    CHECK(std::abs(k(0.0).imag()) < 1e-12 * std::abs(k(0.0).real()));
}

TEST_CASE("kernel gauge and length split") {
    const InterferometerConfig base = with_total_detuning(fig2(), 1.2e5);
    InterferometerConfig phased = base;
    phased.laser_phase = 2.5;
    InterferometerConfig moved = base;
    moved.arm_length -= 0.004;
    moved.half_arm += 0.004;
    for (double w : {5e4, 4e5}) {
        const Complex ref = kernel_exact(base, w);
        CHECK(rel(kernel_exact(phased, w), ref) < 1e-12);
        CHECK(rel(kernel_exact(moved, w), ref) < 1e-9);
    }
}

TEST_CASE("canonical features") {
    InterferometerConfig c = fig2();
    c.offset = 0.0;
    const EffectiveCavity e = effective_cavity(c);
    const KernelScale scale = KernelScale::of(c);
    const double g = e.linewidth;

    const FeatureReport wide = canonical_features_check(e, scale, g / 2.0);
    CHECK(wide.all_passed());
    CHECK(wide.spring_zeros.size() == 1);
    CHECK(wide.damping_zeros.size() == 1);

    const FeatureReport narrow = canonical_features_check(e, scale, 2.0 * g);
    CHECK(narrow.all_passed());
    CHECK(narrow.spring_zeros.size() == 3);

    SECTION("report detects broken features") {
        auto even = [](double d) { return 1.0 + d * d; };
        auto odd = [](double d) { return -d; };
        const FeatureReport r = canonical_features_check(even, odd, 1.0, 2.0, 401);
        CHECK_FALSE(r.all_passed());
        CHECK_FALSE(r.features[0].passed);
        CHECK(r.features[1].passed);
        CHECK_FALSE(r.features[2].passed);
    }
    CHECK_THROWS(canonical_features_check(e, scale, 0.0));
}

TEST_CASE("method names") {
    for (Method m : {Method::exact, Method::narrowband, Method::free_mass})
        CHECK(method_from_string(to_string(m)) == m);
    CHECK(method_from_string("free_mass") == Method::free_mass);
    CHECK_THROWS(method_from_string("fast"));
}

TEST_CASE("sweeps agree with point evaluation") {
    const InterferometerConfig base = fig2();
    const EffectiveCavity cav = effective_cavity(base);
    const double g = cav.linewidth;
    const std::vector<double> detunings{-2.0 * g, -0.5 * g, 0.0, g};
    const double w = two_pi * 133e3;

    const BackActionResponse exact = detuning_sweep(base, detunings, w, Method::exact);
    const BackActionResponse nb = detuning_sweep(base, detunings, w, Method::narrowband);
    const BackActionResponse fm = detuning_sweep(base, detunings, w, Method::free_mass);
    for (std::size_t i = 0; i < detunings.size(); ++i) {
        const Complex k = kernel_exact(with_total_detuning(base, detunings[i]), w);
        CHECK(rel(exact.kernel[i], k) < 1e-9);
        CHECK(exact.spring[i] == exact.kernel[i].real());
        CHECK(exact.damping[i] == -exact.kernel[i].imag() / (2.0 * w));
        CHECK(nb.kernel[i] == kernel_narrowband(cav.detuned(detunings[i]), KernelScale::of(base), w));
        CHECK(fm.kernel[i].imag() == 0.0);
        CHECK(exact.detuning[i] == detunings[i]);
    }

    const std::vector<double> omegas{0.0, 0.5 * g, 2.0 * g};
    const BackActionResponse fe = frequency_sweep(base, omegas, Method::exact);
    const BackActionResponse fn = frequency_sweep(base, omegas, Method::narrowband);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        CHECK(fe.omega[i] == omegas[i]);
        CHECK(rel(fe.kernel[i], kernel_exact(base, omegas[i])) < 1e-12);
        CHECK(std::isfinite(fe.damping[i]));
        CHECK(std::abs(fn.spring[i] - fe.spring[i]) < 0.05 * std::abs(fe.spring.back()));
    }
    CHECK(rel(fn.damping[0], fe.damping[0]) < 0.05);
}

TEST_CASE("mechanical oscillator validation") {
    CHECK_NOTHROW(MechanicalOscillator{1e-10, 0.0, 0.0}.validate());
    CHECK_THROWS(MechanicalOscillator{0.0, 1.0, 0.0}.validate());
    CHECK_THROWS(MechanicalOscillator{1.0, -1.0, 0.0}.validate());
    CHECK_THROWS(MechanicalOscillator{1.0, 1.0, -1.0}.validate());
}

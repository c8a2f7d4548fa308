#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace ospring;
using testing::fig2;
using testing::rel;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

InterferometerConfig fano_config(double t_sr2) {
    InterferometerConfig c;
    c.membrane = MirrorParams::from_power_reflectivity(0.3);
    c.beamsplitter.asymmetry = -0.3;
    c.srm = MirrorParams::from_power_transmissivity(t_sr2);
    c.offset = 0.02 * c.wavelength;
    return with_total_detuning(c, 0.0);
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

} // namespace

TEST_CASE("no power, no noise") {
    InterferometerConfig c = fig2();
    c.input_power = 0.0;
    const auto grid = linspace(-1e6, 1e6, 41);
    for (const NoiseSpectrum& s : {back_action_spectrum(c, grid), back_action_spectrum_closed_form(c, grid)})
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.s_f[i] == 0.0);
}

TEST_CASE("a perfectly reflecting recycling mirror blocks detector-port vacuum") {
    const InterferometerConfig c = fano_config(0.0);
    const auto grid = linspace(-8e7, 8e7, 201);
    const NoiseSpectrum s = back_action_spectrum(c, grid);
    const NoiseSpectrum f = back_action_spectrum_closed_form(c, grid);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.detector_part[i] < 1e-20 * s.s_f[i] + 1e-300);
        CHECK(f.detector_part[i] == 0.0);
    }
}

TEST_CASE("closed form matches the field propagation with the carrier imbalance phase") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int k = 0; k < 30; ++k) {
        InterferometerConfig c = testing::random_config(rng);
        c.imbalance = ImbalancePhase::carrier_only;
        const EffectiveCavity e = effective_cavity(c);
        const auto grid = linspace(-4.0 * e.linewidth, 4.0 * e.linewidth, 33);
        const NoiseSpectrum a = back_action_spectrum(c, grid);
        const NoiseSpectrum b = back_action_spectrum_closed_form(c, grid);
        const double peak = max_of(a.s_f);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(a.laser_part[i] - b.laser_part[i]) / peak);
            worst = std::max(worst, std::abs(a.detector_part[i] - b.detector_part[i]) / peak);
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("the sideband imbalance phase is a small correction at desk-top scale") {
    const InterferometerConfig c = fig2();
    InterferometerConfig fast = c;
    fast.imbalance = ImbalancePhase::carrier_only;
    const auto grid = linspace(-1e6, 1e6, 101);
    const NoiseSpectrum a = back_action_spectrum(c, grid);
    const NoiseSpectrum b = back_action_spectrum(fast, grid);
    const double peak = max_of(a.s_f);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(a.s_f[i] - b.s_f[i]) / peak);
    CHECK(worst < 1e-6);
}

TEST_CASE("positivity and closure over random draws") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool positive = true, closed = true;
    for (int k = 0; k < 200; ++k) {
        const InterferometerConfig c = testing::random_config(rng);
        const double g = effective_cavity(c).linewidth;
        std::vector<double> grid(50);
        for (double& w : grid) w = 10.0 * g * u(rng);
        const NoiseSpectrum s = back_action_spectrum(c, grid);
        for (std::size_t i = 0; i < s.size(); ++i) {
            positive = positive && s.s_f[i] >= 0.0 && s.laser_part[i] >= 0.0 && s.detector_part[i] >= 0.0;
            closed = closed && std::abs(s.laser_part[i] + s.detector_part[i] - s.s_f[i]) <= 1e-12 * s.s_f[i];
        }
    }
    CHECK(positive);
    CHECK(closed);
}

TEST_CASE("grid order is preserved") {
    const InterferometerConfig c = fig2();
    const std::vector<double> grid{3e5, -2e5, 0.0, 7e5, -9e5};
    const NoiseSpectrum s = back_action_spectrum(c, grid);
    CHECK(s.omega == grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double one[1] = {grid[i]};
        CHECK(back_action_spectrum(c, one).s_f[0] == s.s_f[i]);
    }
}

TEST_CASE("spectral asymmetry") {
    SECTION("vanishes on resonance at the dark port") {
        InterferometerConfig c = fig2();
        c.offset = 0.0;
        const double w = 1e5;
        const double grid[1] = {w};
        CHECK(std::abs(spectral_asymmetry(c, w)) < 1e-10 * back_action_spectrum(c, grid).s_f[0]);
    }
    SECTION("red detuning: sign follows the optical damping") {
        const InterferometerConfig base = fig2();
        const double g = effective_cavity(base).linewidth;
        const InterferometerConfig c = with_total_detuning(base, -g);
        const double w = two_pi * 133e3;
        const double damping = damping_from_kernel(kernel_exact(c, w), w);
        CHECK(damping != 0.0);
        CHECK((spectral_asymmetry(c, w) > 0.0) == (damping > 0.0));
    }
    SECTION("continuous at zero frequency") {
        const InterferometerConfig c = with_total_detuning(fig2(), -2e5);
        const double far = std::abs(spectral_asymmetry(c, 1e5));
        CHECK(std::abs(spectral_asymmetry(c, 1.0)) < 1e-4 * far);
        CHECK_THROWS(spectral_asymmetry(c, 0.0));
    }
    SECTION("matches the damping of the exact kernel") {
        const InterferometerConfig base = fig2();
        const double g = effective_cavity(base).linewidth;
        for (double d : {-2.0, -0.5, 0.7, 1.5}) {
            const InterferometerConfig c = with_total_detuning(base, d * g);
            for (double w : {0.3 * g, g, 2.5 * g}) {
                const double damping = damping_from_kernel(kernel_exact(c, w), w);
                CHECK(rel(damping, spectral_asymmetry(c, w) / (4.0 * reduced_planck * w)) < 1e-6);
            }
        }
    }
}

TEST_CASE("zeros of the asymmetry coincide with zeros of the damping") {
    const InterferometerConfig base = fig2();
    const double g = effective_cavity(base).linewidth;
    const double w = two_pi * 133e3;
    auto asym = [&](double d) { return spectral_asymmetry(with_total_detuning(base, d), w); };
    auto damping = [&](double d) { return damping_from_kernel(kernel_exact(with_total_detuning(base, d), w), w); };
    const auto za = find_zero_crossings(asym, -3.0 * g, 3.0 * g, 241, 1e-9 * g);
    const auto zd = find_zero_crossings(damping, -3.0 * g, 3.0 * g, 241, 1e-9 * g);
    REQUIRE(za.size() == zd.size());
    REQUIRE(!za.empty());
    for (std::size_t i = 0; i < za.size(); ++i) CHECK(std::abs(za[i] - zd[i]) < 6.0 * g / 240.0);
}

TEST_CASE("dark-port spectrum is a single Lorentzian peak") {
    InterferometerConfig c = fig2();
    c.offset = 0.0;
    const double g = effective_cavity(c).linewidth;
    const double detuning = 0.8 * g;
    c = with_total_detuning(c, detuning);
    const auto grid = linspace(-6.0 * g, 6.0 * g, 1201);
    const NoiseSpectrum s = back_action_spectrum(c, grid);
    const auto peak = std::max_element(s.s_f.begin(), s.s_f.end());
    const std::size_t ip = static_cast<std::size_t>(peak - s.s_f.begin());
    bool unimodal = true;
    for (std::size_t i = 1; i <= ip; ++i) unimodal = unimodal && s.s_f[i] >= s.s_f[i - 1];
    for (std::size_t i = ip + 1; i < s.size(); ++i) unimodal = unimodal && s.s_f[i] <= s.s_f[i - 1];
    CHECK(unimodal);
    CHECK(std::abs(std::abs(grid[ip]) - detuning) <= 12.0 * g / 1200.0);
}

TEST_CASE("Fano and Lorentz structure") {
    SECTION("laser-port vacuum alone shows a dip") {
        const InterferometerConfig c = fano_config(0.0);
        const auto grid = linspace(-8e7, 8e7, 801);
        const NoiseSpectrum s = normalized(back_action_spectrum(c, grid));
        const auto lo = std::min_element(s.s_f.begin(), s.s_f.end());
        CHECK(*lo < 1e-3);
        CHECK(max_of(s.s_f) == 1.0);
    }
    SECTION("an open recycling mirror adds a Lorentzian") {
        const InterferometerConfig c = fano_config(0.3);
        const auto grid = linspace(-1.5e9, 1.5e9, 801);
        const NoiseSpectrum s = back_action_spectrum(c, grid);
        CHECK(max_of(s.detector_part) > 0.1 * max_of(s.s_f));
        CHECK(max_of(s.laser_part) > 0.01 * max_of(s.s_f));
    }
}

TEST_CASE("gauge and length-split invariance") {
    const InterferometerConfig base = with_total_detuning(fig2(), -1e5);
    const auto grid = linspace(-5e5, 5e5, 21);
    const NoiseSpectrum ref = back_action_spectrum(base, grid);
    InterferometerConfig phased = base;
    phased.laser_phase = 1.234;
    InterferometerConfig moved = base;
    moved.arm_length += 0.005;
    moved.half_arm -= 0.005;
    for (const InterferometerConfig& c : {phased, moved}) {
        const NoiseSpectrum s = back_action_spectrum(c, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(rel(s.s_f[i], ref.s_f[i]) < 1e-9);
    }
}

TEST_CASE("normalized spectra keep the decomposition") {
    const NoiseSpectrum s = normalized(back_action_spectrum(fano_config(0.3), linspace(-1e9, 1e9, 101)));
    CHECK(max_of(s.s_f) == 1.0);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(s.laser_part[i] + s.detector_part[i] - s.s_f[i]) < 1e-15);
    NoiseSpectrum zero;
    zero.omega = {0.0};
    zero.s_f = zero.laser_part = zero.detector_part = {0.0};
    CHECK(normalized(zero).s_f[0] == 0.0);
}

TEST_CASE("degenerate resonance is reported") {
    InterferometerConfig c;
    c.membrane = {1.0, 0.0};
    c.srm = {1.0, 0.0};
    const double grid[1] = {0.0};
    CHECK_THROWS_AS(back_action_spectrum(c, grid), DegenerateResonance);
    CHECK_THROWS_AS(back_action_spectrum_closed_form(c, grid), DegenerateResonance);
}

#pragma once

// Command-line front end: subcommands over a run configuration, CSV/JSON emission.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ospring/backaction.hpp"
#include "ospring/cavity_model.hpp"
#include "ospring/noise_spectra.hpp"
#include "ospring/parallel.hpp"
#include "ospring/run_config.hpp"
#include "ospring/stability.hpp"
#include "ospring/transfer_optics.hpp"

namespace ospring::app {

/// Shortest decimal that round-trips to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Column {
    std::string name;
    std::vector<double> numbers;
    std::vector<std::string> text;
    bool is_text = false;

    std::size_t size() const { return is_text ? text.size() : numbers.size(); }
};

struct Table {
    std::vector<Column> columns;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();

    Column& numeric(std::string name, std::vector<double> values) {
        columns.push_back({std::move(name), std::move(values), {}, false});
        return columns.back();
    }
    Column& labels(std::string name, std::vector<std::string> values) {
        columns.push_back({std::move(name), {}, std::move(values), true});
        return columns.back();
    }
};

inline void write_csv(const Table& t, std::ostream& out) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c].name;
    out << '\n';
    const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            const Column& col = t.columns[c];
            out << (c ? "," : "") << (col.is_text ? col.text[r] : format_number(col.numbers[r]));
        }
        out << '\n';
    }
}

inline void write_json(const Table& t, std::ostream& out) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["meta"] = t.meta;
    for (const Column& col : t.columns) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        if (col.is_text) {
            for (const auto& s : col.text) arr.push_back(s);
        } else {
            for (double v : col.numbers) {
                if (std::isfinite(v)) arr.push_back(v);
                else arr.push_back(nullptr);
            }
        }
        j[col.name] = std::move(arr);
    }
    out << j.dump(2) << '\n';
}

namespace detail {

inline void scale_by_max_abs(std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (m > 0.0)
        for (double& x : v) x /= m;
}

inline nlohmann::ordered_json describe(const ResolvedPoint& p) {
    const InterferometerConfig& c = p.interferometer;
    nlohmann::ordered_json m;
    m["wavelength_m"] = c.wavelength;
    m["input_power_w"] = c.input_power;
    m["arm_length_m"] = c.arm_length;
    m["half_arm_m"] = c.half_arm;
    m["sr_distance_m"] = c.sr_distance;
    m["cavity_length_m"] = c.cavity_length();
    m["membrane_reflectivity"] = c.membrane.reflectivity;
    m["membrane_transmissivity"] = c.membrane.transmissivity;
    m["srm_reflectivity"] = c.srm.reflectivity;
    m["srm_transmissivity"] = c.srm.transmissivity;
    m["bs_asymmetry"] = c.beamsplitter.asymmetry;
    m["dark_port_index"] = c.dark_port_index;
    m["dark_port_offset_m"] = dark_port_offset(c.membrane, c.beamsplitter, c.wavelength, c.dark_port_index);
    m["offset_m"] = c.offset;
    m["srm_detuning_rad_s"] = p.cavity.srm_detuning;
    m["detuning_rad_s"] = p.cavity.detuning;
    m["linewidth_rad_s"] = p.cavity.linewidth;
    m["sideband_rad_s"] = p.omega;
    if (p.oscillator) {
        m["mass_kg"] = p.oscillator->mass;
        m["mech_freq_rad_s"] = p.oscillator->frequency;
        m["mech_damping_rad_s"] = p.oscillator->damping;
    }
    return m;
}

inline const SweepSpec& single_sweep(const RunConfig& rc, const char* command) {
    if (rc.sweeps.size() != 1)
        throw ValidationError("sweep", std::string(command) + " needs exactly one [sweep] block");
    return rc.sweeps.front();
}

/// Operating points along a sweep, resolved in parallel.
inline std::vector<ResolvedPoint> resolve_sweep(const RunConfig& rc, const SweepSpec& s) {
    const std::vector<double> values = s.values();
    std::vector<ResolvedPoint> points(values.size());
    parallel_for(values.size(), [&](std::size_t i) { points[i] = rc.resolve({{s.variable, values[i]}}); });
    return points;
}

inline Method parse_method(const std::string& name, Method fallback) {
    if (name.empty()) return fallback;
    try {
        return method_from_string(name);
    } catch (const std::invalid_argument& e) {
        throw ValidationError("method", e.what());
    }
}

inline SpringDamping evaluate(const ResolvedPoint& p, Method method, Complex& kernel) {
    const KernelScale scale = KernelScale::of(p.interferometer);
    switch (method) {
    case Method::exact: {
        const ExactKernel k(p.interferometer);
        kernel = k(p.omega);
        return extract_spring_damping(k, p.omega, p.cavity.linewidth);
    }
    case Method::narrowband: {
        auto k = [&](double w) { return kernel_narrowband(p.cavity, scale, w); };
        kernel = k(p.omega);
        return extract_spring_damping(k, p.omega, p.cavity.linewidth);
    }
    case Method::free_mass: {
        const SpringDamping sd = free_mass_spring_damping(p.cavity, scale, p.cavity.detuning);
        kernel = Complex(sd.spring, 0.0);
        return sd;
    }
    }
    return {};
}

} // namespace detail

struct Options {
    std::string command;
    std::string config_path;
    std::string out_path;
    std::string format;
    std::string method;
    bool normalize = false;
};

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline Table run_darkport(const RunConfig& rc, std::ostream&) {
    std::vector<ResolvedPoint> points;
    Table t;
    if (rc.sweeps.size() == 1) {
        points = detail::resolve_sweep(rc, rc.sweeps.front());
        t.numeric(rc.sweeps.front().variable, rc.sweeps.front().values());
    } else if (rc.sweeps.empty()) {
        points.push_back(rc.resolve());
    } else {
        throw ValidationError("sweep", "darkport takes at most one [sweep] block");
    }
    std::vector<double> index, dp, xi, dl, residual, tau;
    for (const ResolvedPoint& p : points) {
        const InterferometerConfig& c = p.interferometer;
        const double q = dark_port_fraction(c.membrane, c.beamsplitter, c.dark_port_index);
        index.push_back(c.dark_port_index);
        dp.push_back(c.wavelength * q);
        xi.push_back(c.offset);
        dl.push_back(c.wavelength * q + c.offset);
        residual.push_back(std::abs(effective_mirror_scalars(c.membrane, c.beamsplitter, two_pi * q).tau));
        const OpticalLayout layout = optical_layout(c);
        tau.push_back(std::abs(msi_matrix(layout, 0.0).tau));
    }
    t.numeric("dark_port_index", index);
    t.numeric("dark_port_offset_m", dp);
    t.numeric("offset_m", xi);
    t.numeric("arm_imbalance_m", dl);
    t.numeric("tau_residual", residual);
    t.numeric("tau_abs", tau);
    t.meta = detail::describe(points.front());
    return t;
}

inline Table run_cavity(const RunConfig& rc, std::ostream& err) {
    std::vector<ResolvedPoint> points;
    Table t;
    if (rc.sweeps.size() == 1) {
        points = detail::resolve_sweep(rc, rc.sweeps.front());
        t.numeric(rc.sweeps.front().variable, rc.sweeps.front().values());
    } else if (rc.sweeps.empty()) {
        points.push_back(rc.resolve());
    } else {
        throw ValidationError("sweep", "cavity takes at most one [sweep] block");
    }
    std::vector<double> cols[9];
    for (const ResolvedPoint& p : points) {
        const EffectiveCavity& e = p.cavity;
        const double v[9] = {e.detuning,          e.srm_detuning,      e.membrane_detuning,
                             e.linewidth,         e.linewidth_exact,   e.srm_linewidth,
                             e.membrane_linewidth, e.cavity_frequency, e.phase_offset};
        for (int k = 0; k < 9; ++k) cols[k].push_back(v[k]);
    }
    for (const auto& w : points.front().cavity.warnings) err << "warning: " << w << '\n';
    const char* names[9] = {"detuning_rad_s",        "srm_detuning_rad_s",     "membrane_detuning_rad_s",
                            "linewidth_rad_s",       "linewidth_exact_rad_s",  "srm_linewidth_rad_s",
                            "membrane_linewidth_rad_s", "cavity_frequency_rad_s", "phase_offset_rad"};
    for (int k = 0; k < 9; ++k) t.numeric(names[k], cols[k]);
    t.meta = detail::describe(points.front());
    return t;
}

inline Table run_spectrum(const RunConfig& rc, const std::string& method, bool normalize, std::ostream& err) {
    const SweepSpec& s = detail::single_sweep(rc, "spectrum");
    if (!PhysicalKeys::is_sideband(s.variable))
        throw ValidationError("variable", "spectrum sweeps sideband_over_gamma or sideband_rad_s");
    const std::vector<ResolvedPoint> points = detail::resolve_sweep(rc, s);
    std::vector<double> grid;
    for (const auto& p : points) grid.push_back(p.omega);
    const InterferometerConfig& cfg = points.front().interferometer;
    for (const auto& w : points.front().cavity.warnings) err << "warning: " << w << '\n';

    NoiseSpectrum spec;
    if (method.empty() || method == "exact") spec = back_action_spectrum(cfg, grid);
    else if (method == "fast") spec = back_action_spectrum_closed_form(cfg, grid);
    else throw ValidationError("method", "spectrum methods are exact and fast");
    if (normalize) spec = normalized(std::move(spec));

    Table t;
    t.numeric("omega_rad_s", spec.omega);
    t.numeric("s_f", spec.s_f);
    t.numeric("laser_part", spec.laser_part);
    t.numeric("detector_part", spec.detector_part);
    t.meta = detail::describe(points.front());
    t.meta["method"] = method.empty() ? "exact" : method;
    t.meta["normalized"] = normalize;
    return t;
}

inline Table run_backaction(const RunConfig& rc, const std::string& method_name, bool normalize,
                            std::ostream& err) {
    const SweepSpec& s = detail::single_sweep(rc, "backaction");
    const Method method = detail::parse_method(method_name, Method::exact);
    const std::vector<ResolvedPoint> points = detail::resolve_sweep(rc, s);
    for (const auto& w : points.front().cavity.warnings) err << "warning: " << w << '\n';

    const std::size_t n = points.size();
    std::vector<double> re(n), im(n), spring(n), damping(n);
    parallel_for(n, [&](std::size_t i) {
        Complex k;
        const SpringDamping sd = detail::evaluate(points[i], method, k);
        re[i] = k.real();
        im[i] = k.imag();
        spring[i] = sd.spring;
        damping[i] = sd.damping;
    });
    if (normalize) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::hypot(re[i], im[i]));
        if (m > 0.0)
            for (std::size_t i = 0; i < n; ++i) {
                re[i] /= m;
                im[i] /= m;
            }
        detail::scale_by_max_abs(spring);
        detail::scale_by_max_abs(damping);
    }
    Table t;
    t.numeric(s.variable, s.values());
    t.numeric("k_re", re);
    t.numeric("k_im", im);
    t.numeric("spring_n_per_m", spring);
    t.numeric("damping_ns_per_m", damping);
    t.meta = detail::describe(points.front());
    t.meta["method"] = to_string(method);
    t.meta["normalized"] = normalize;
    return t;
}

inline Table run_stability(const RunConfig& rc, const std::string& method_name, bool normalize,
                           std::ostream& err) {
    const SweepSpec& s = detail::single_sweep(rc, "stability");
    if (!PhysicalKeys::is_detuning(s.variable))
        throw ValidationError("variable", "stability sweeps detuning_over_gamma or detuning_rad_s");
    const ResolvedPoint base = rc.resolve(rc.sweep_starts());
    if (!base.oscillator) throw ValidationError("mass_kg", "stability needs an [oscillator] with mass_kg");
    const Method method = detail::parse_method(method_name, Method::narrowband);
    const std::vector<ResolvedPoint> points = detail::resolve_sweep(rc, s);
    std::vector<double> detunings;
    for (const auto& p : points) detunings.push_back(p.cavity.detuning);

    StabilityReport r = stability_report(base.interferometer, *base.oscillator, detunings, base.omega, method);
    if (!r.oracles_agree()) err << "warning: Routh-Hurwitz and root verdicts disagree at some detunings\n";
    for (const auto& w : base.cavity.warnings) err << "warning: " << w << '\n';

    std::vector<std::string> labels, rh;
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        labels.push_back(to_string(r.labels[i]));
        rh.push_back(r.rh_verdicts[i] ? "true" : "false");
    }
    if (normalize) {
        detail::scale_by_max_abs(r.spring);
        detail::scale_by_max_abs(r.damping);
    }
    Table t;
    t.numeric("delta_rad_s", r.detuning);
    t.numeric("spring", r.spring);
    t.numeric("damping", r.damping);
    t.labels("regime_label", labels);
    t.labels("rh_stable", rh);
    t.meta = detail::describe(base);
    t.meta["method"] = to_string(method);
    t.meta["normalized"] = normalize;
    t.meta["spring_zeros_rad_s"] = r.spring_zeros;
    t.meta["damping_zeros_rad_s"] = r.damping_zeros;
    nlohmann::ordered_json windows = nlohmann::ordered_json::array();
    for (const auto& [a, b] : r.stable_windows) windows.push_back({a, b});
    t.meta["stable_windows_rad_s"] = windows;
    return t;
}

inline Table run_map(const RunConfig& rc, bool normalize, std::ostream&) {
    if (rc.sweeps.size() != 2) throw ValidationError("sweep", "map needs two [sweep] blocks");
    const SweepSpec* ds = nullptr;
    const SweepSpec* xs = nullptr;
    for (const auto& s : rc.sweeps) {
        if (PhysicalKeys::is_detuning(s.variable)) ds = &s;
        else if (s.variable == "offset_xi_lambda0") xs = &s;
    }
    if (!ds || !xs) throw ValidationError("variable", "map sweeps one detuning key and offset_xi_lambda0");
    const ResolvedPoint base = rc.resolve(rc.sweep_starts());
    const std::vector<double> xi_units = xs->values();
    std::vector<double> offsets;
    for (double v : xi_units) offsets.push_back(v * base.interferometer.wavelength);
    LinewidthUnits units;
    units.detuning = ds->variable == "detuning_over_gamma";
    units.omega = rc.keys.has("sideband_over_gamma");
    const double omega = units.omega ? rc.keys.get("sideband_over_gamma") : base.omega;

    RegimeMap m = regime_map(base.interferometer, ds->values(), offsets, omega, units);
    if (normalize) {
        detail::scale_by_max_abs(m.spring);
        detail::scale_by_max_abs(m.damping);
    }
    const std::size_t n = m.labels.size();
    std::vector<double> xi(n);
    std::vector<std::string> labels(n);
    for (std::size_t k = 0; k < n; ++k) {
        xi[k] = offsets[k / m.detuning.size()];
        labels[k] = to_string(m.labels[k]);
    }
    Table t;
    t.numeric("delta", m.node_detuning);
    t.numeric("xi", xi);
    t.numeric("spring", m.spring);
    t.numeric("damping", m.damping);
    t.labels("regime_label", labels);
    t.meta = detail::describe(base);
    t.meta["normalized"] = normalize;
    return t;
}

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

/// Invariant checks at the configured operating point.
inline std::vector<Check> validation_checks(const RunConfig& rc) {
    const ResolvedPoint p = rc.resolve(rc.sweep_starts());
    const InterferometerConfig& cfg = p.interferometer;
    const OpticalLayout layout = optical_layout(cfg);
    const double g = p.cavity.linewidth;
    std::vector<Check> out;
    auto sci = [](double v) {
        std::ostringstream s;
        s.precision(3);
        s << std::scientific << v;
        return s.str();
    };
    const double probes[] = {0.0, 0.3 * g, -0.7 * g, 2.0 * g};

    double unitary = 0.0, mirror = 0.0, energy = 0.0, resolvent = 0.0;
    for (double w : probes) {
        const EffectiveMirror em = msi_matrix(layout, w);
        unitary = std::max(unitary, unitarity_defect(em.transfer));
        mirror = std::max(mirror, std::abs(em.rho2 + std::conj(em.rho1)));
        energy = std::max(energy, std::abs(std::norm(em.rho2) + std::norm(em.tau) - 1.0));
        resolvent = std::max(resolvent, max_abs_difference(recycling_resolvent(layout, w).matrix,
                                                           inverse(recycling_operator(layout, w))));
    }
    out.push_back({"msi unitarity", unitary < 1e-12, sci(unitary)});
    out.push_back({"rho2 = -conj(rho1)", mirror < 1e-14, sci(mirror)});
    out.push_back({"|rho2|^2 + |tau|^2 = 1", energy < 1e-12, sci(energy)});
    out.push_back({"resolvent closed form vs inversion", resolvent < 1e-12 * std::max(1.0, 1.0 / (1.0 - cfg.srm.reflectivity)),
                   sci(resolvent)});

    const double q = dark_port_fraction(cfg.membrane, cfg.beamsplitter, cfg.dark_port_index);
    const double residual = std::abs(effective_mirror_scalars(cfg.membrane, cfg.beamsplitter, two_pi * q).tau);
    out.push_back({"dark-port residual", residual < 1e-12, sci(residual)});

    const EffectiveCavity& e = p.cavity;
    const double split = std::abs(e.detuning - (e.srm_detuning + e.membrane_detuning));
    out.push_back({"Delta = delta_SR + delta_m", split <= 1e-12 * std::max(1.0, std::abs(e.detuning)), sci(split)});
    const double second = std::abs(e.linewidth_exact - e.linewidth) / e.linewidth_exact;
    const double bound = cfg.srm.transmissivity * cfg.srm.transmissivity + 4.0 * cfg.cavity_length() * e.membrane_linewidth / speed_of_light;
    out.push_back({"exact vs narrow-band linewidth", second < bound, sci(second) + " < " + sci(bound)});

    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(0.25 * g * i);
    const NoiseSpectrum s = back_action_spectrum(cfg, grid);
    double closure = 0.0, negative = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        closure = std::max(closure, std::abs(s.s_f[i] - s.laser_part[i] - s.detector_part[i]) /
                                        std::max(s.s_f[i], 1e-300));
        negative = std::min(negative, s.s_f[i]);
    }
    out.push_back({"S_F >= 0", negative >= 0.0, sci(negative)});
    out.push_back({"S_F decomposition closes", closure < 1e-12, sci(closure)});

    if (cfg.input_power > 0.0) {
        const ExactKernel kernel(cfg);
        double fdt = 0.0;
        for (double w : {0.4 * g, 1.3 * g}) {
            const double damping = damping_from_kernel(kernel(w), w);
            const double asym = spectral_asymmetry(cfg, w) / (4.0 * reduced_planck * w);
            fdt = std::max(fdt, std::abs(damping - asym) / std::max(std::abs(damping), std::abs(asym)));
        }
        out.push_back({"damping = spectral asymmetry / (4 hbar omega)", fdt < 1e-6, sci(fdt)});

        if (e.warnings.empty()) {
            const KernelScale scale = KernelScale::of(cfg);
            double worst = 0.0;
            for (double w : {0.3 * g, g, 2.0 * g}) {
                const Complex a = kernel(w);
                const Complex b = kernel_narrowband(e, scale, w);
                worst = std::max(worst, std::abs(a - b) / std::abs(a));
            }
            out.push_back({"exact vs narrow-band kernel (5%)", worst < 0.05, sci(worst)});
        }
    }
    if (p.oscillator) {
        bool agree = true;
        for (double d : {-2.0 * g, -0.5 * g, 0.0, 0.5 * g, 2.0 * g}) {
            const EffectiveCavity ed = e.detuned(d);
            agree = agree && routh_hurwitz(ed, KernelScale::of(cfg), *p.oscillator) ==
                                 roots_stable(ed, KernelScale::of(cfg), *p.oscillator);
        }
        out.push_back({"Routh-Hurwitz agrees with roots", agree, agree ? "5/5" : "mismatch"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int dispatch(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig rc = load_config(o.config_path);
    OutputSpec spec = rc.output;
    if (!o.out_path.empty()) spec.path = o.out_path;
    if (!o.format.empty()) {
        if (o.format == "csv") spec.format = OutputFormat::csv;
        else if (o.format == "json") spec.format = OutputFormat::json;
        else throw ValidationError("format", "must be csv or json");
    }
    const bool normalize = spec.normalize || o.normalize;

    if (o.command == "validate") {
        bool ok = true;
        for (const Check& c : validation_checks(rc)) {
            out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
            ok = ok && c.passed;
        }
        return ok ? 0 : 2;
    }

    Table t;
    if (o.command == "darkport") t = run_darkport(rc, err);
    else if (o.command == "cavity") t = run_cavity(rc, err);
    else if (o.command == "spectrum") t = run_spectrum(rc, o.method, normalize, err);
    else if (o.command == "backaction") t = run_backaction(rc, o.method, normalize, err);
    else if (o.command == "stability") t = run_stability(rc, o.method, normalize, err);
    else if (o.command == "map") t = run_map(rc, normalize, err);
    else throw ValidationError("command", "unknown subcommand '" + o.command + "'");
    t.meta = nlohmann::ordered_json{{"command", o.command}, {"parameters", t.meta}};

    std::ofstream file;
    std::ostream* sink = &out;
    if (spec.path) {
        file.open(*spec.path, std::ios::binary);
        if (!file) throw std::ios_base::failure("cannot open output file '" + *spec.path + "'");
        sink = &file;
    }
    if (spec.format == OutputFormat::csv) write_csv(t, *sink);
    else write_json(t, *sink);
    sink->flush();
    if (!*sink) throw std::ios_base::failure("write failed");
    return 0;
}

/// Runs the CLI. Exit codes: 0 success, 1 usage/parse/I-O error, 2 validation failure.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App cli{"Optomechanical back-action in signal-recycled Michelson-Sagnac interferometers", "ospring"};
    cli.require_subcommand(1);
    Options o;
    const std::pair<const char*, const char*> commands[] = {
        {"darkport", "dark-port offset, membrane offset and tau residual"},
        {"cavity", "effective cavity detunings and linewidths"},
        {"spectrum", "unsymmetrized back-action force noise over a sideband sweep"},
        {"backaction", "dynamic back-action kernel, spring and damping over a sweep"},
        {"stability", "spring/damping zeros, regimes and Routh-Hurwitz verdicts over a detuning sweep"},
        {"map", "regime labels over a detuning x offset grid"},
        {"validate", "invariant checks at the configured operating point"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = cli.add_subcommand(name, help);
        sub->add_option("--config,-c", o.config_path, "configuration file")->required();
        sub->add_option("--out,-o", o.out_path, "output file (default: [output] path or stdout)");
        sub->add_option("--format,-f", o.format, "csv or json");
        sub->add_option("--method,-m", o.method, "exact|narrowband|freemass (spectrum: exact|fast)");
        sub->add_flag("--normalize", o.normalize, "divide curves by their largest magnitude");
        sub->callback([&o, n = std::string(name)] { o.command = n; });
    }
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    try {
        return dispatch(o, out, err);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ospring::app

#pragma once

// Line-oriented run configuration:
//
//   # comment
//   [interferometer]
//   wavelength_nm = 1064
//   detuning_over_gamma = -1
//   [sweep]
//   variable = detuning_over_gamma
//   start = -3
//   stop = 3
//   points = 201
//   [output]
//   format = csv
//
// Values are in the units named by the key and converted to SI on resolution.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "ospring/backaction.hpp"
#include "ospring/cavity_model.hpp"
#include "ospring/constants.hpp"
#include "ospring/error.hpp"

namespace ospring {

enum class SweepScale { lin, log };

struct SweepSpec {
    std::string variable;
    double start = 0.0;
    double stop = 0.0;
    std::size_t points = 0;
    SweepScale scale = SweepScale::lin;
    std::size_t line = 0;

    std::vector<double> values() const {
        std::vector<double> v(points);
        for (std::size_t i = 0; i < points; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(points - 1);
            if (scale == SweepScale::lin) {
                v[i] = i + 1 == points ? stop : start + (stop - start) * f;
            } else {
                v[i] = i + 1 == points ? stop : start * std::pow(stop / start, f);
            }
        }
        return v;
    }
};

enum class OutputFormat { csv, json };

struct OutputSpec {
    std::optional<std::string> path;
    OutputFormat format = OutputFormat::csv;
    bool normalize = false;
};

/// Physical keys exactly as written (user units). Unset keys take the defaults listed in `defaults()`.
class PhysicalKeys {
public:
    static const std::vector<std::string>& interferometer_keys() {
        static const std::vector<std::string> k{
            "wavelength_nm", "input_power_mw", "arm_length_m", "half_arm_m", "sr_distance_m",
            "membrane_power_reflectivity", "sr_power_transmissivity", "bs_asymmetry", "dark_port_index",
            "offset_xi_lambda0", "detuning_over_gamma", "detuning_rad_s", "sideband_over_gamma",
            "sideband_rad_s"};
        return k;
    }
    static const std::vector<std::string>& oscillator_keys() {
        static const std::vector<std::string> k{"mass_kg", "mech_freq_hz", "mech_damping_hz"};
        return k;
    }
    static bool is_physical(const std::string& key) {
        const auto& a = interferometer_keys();
        const auto& b = oscillator_keys();
        return std::find(a.begin(), a.end(), key) != a.end() || std::find(b.begin(), b.end(), key) != b.end();
    }
    static bool is_detuning(const std::string& key) {
        return key == "detuning_over_gamma" || key == "detuning_rad_s";
    }
    static bool is_sideband(const std::string& key) {
        return key == "sideband_over_gamma" || key == "sideband_rad_s";
    }

    void set(const std::string& key, double value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void erase(const std::string& key) { values_.erase(key); }
    const std::map<std::string, double>& values() const { return values_; }

    double get(const std::string& key) const {
        if (auto it = values_.find(key); it != values_.end()) return it->second;
        if (auto it = defaults().find(key); it != defaults().end()) return it->second;
        throw ValidationError(key, "required key is missing");
    }

    static const std::map<std::string, double>& defaults() {
        static const std::map<std::string, double> d{
            {"wavelength_nm", 1064.0},   {"input_power_mw", 200.0},
            {"arm_length_m", 0.04},      {"half_arm_m", 0.03},
            {"sr_distance_m", 0.017},    {"membrane_power_reflectivity", 0.17},
            {"sr_power_transmissivity", 3e-4}, {"bs_asymmetry", 0.0},
            {"dark_port_index", 1.0},    {"offset_xi_lambda0", 0.0},
            {"mech_freq_hz", 0.0},       {"mech_damping_hz", 0.0}};
        return d;
    }

private:
    std::map<std::string, double> values_;
};

/// Operating point resolved to SI units.
struct ResolvedPoint {
    InterferometerConfig interferometer;
    EffectiveCavity cavity;   // at the resolved detuning
    double omega = 0.0;       // evaluation sideband frequency [rad/s]
    std::optional<MechanicalOscillator> oscillator;
};

struct RunConfig {
    PhysicalKeys keys;
    std::vector<SweepSpec> sweeps;
    OutputSpec output;

    using Override = std::pair<std::string, double>;

    /// Resolves keys, with the given keys overridden, to an SI operating point. Overriding one
    /// detuning (or sideband) key replaces whichever form of it the file gave.
    ResolvedPoint resolve(std::initializer_list<Override> overrides = {}) const {
        return resolve(std::vector<Override>(overrides));
    }

    ResolvedPoint resolve(const std::vector<Override>& overrides) const {
        PhysicalKeys k = keys;
        for (const auto& [key, value] : overrides) {
            if (PhysicalKeys::is_detuning(key)) {
                k.erase("detuning_over_gamma");
                k.erase("detuning_rad_s");
            }
            if (PhysicalKeys::is_sideband(key)) {
                k.erase("sideband_over_gamma");
                k.erase("sideband_rad_s");
            }
            k.set(key, value);
        }
        return resolve_keys(k);
    }

    /// Overrides that place every sweep at its start value.
    std::vector<Override> sweep_starts() const {
        std::vector<Override> out;
        for (const auto& s : sweeps) out.emplace_back(s.variable, s.start);
        return out;
    }

    static ResolvedPoint resolve_keys(const PhysicalKeys& k) {
        auto checked = [&](const std::string& key, auto&& build) {
            try {
                return build(k.get(key));
            } catch (const ValidationError&) {
                throw;
            } catch (const std::exception& e) {
                throw ValidationError(key, e.what());
            }
        };
        auto positive = [&](const std::string& key) {
            const double v = k.get(key);
            if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(key, "must be positive and finite");
            return v;
        };

        InterferometerConfig cfg;
        cfg.wavelength = positive("wavelength_nm") * 1e-9;
        cfg.input_power = k.get("input_power_mw") * 1e-3;
        if (!(cfg.input_power >= 0.0) || !std::isfinite(cfg.input_power))
            throw ValidationError("input_power_mw", "must be non-negative and finite");
        cfg.arm_length = positive("arm_length_m");
        cfg.half_arm = positive("half_arm_m");
        cfg.sr_distance = positive("sr_distance_m");
        cfg.membrane = checked("membrane_power_reflectivity",
                               [](double v) { return MirrorParams::from_power_reflectivity(v); });
        if (!(cfg.membrane.reflectivity > 0.0))
            throw ValidationError("membrane_power_reflectivity", "must be positive");
        cfg.srm = checked("sr_power_transmissivity",
                          [](double v) { return MirrorParams::from_power_transmissivity(v); });
        cfg.beamsplitter.asymmetry = k.get("bs_asymmetry");
        if (!(std::abs(cfg.beamsplitter.asymmetry) < 1.0))
            throw ValidationError("bs_asymmetry", "must lie in (-1, 1)");
        const double n = k.get("dark_port_index");
        if (n != std::floor(n) || n < 1.0 || std::fmod(n, 2.0) != 1.0 || n > 1e6)
            throw ValidationError("dark_port_index", "must be an odd positive integer");
        cfg.dark_port_index = static_cast<int>(n);
        cfg.offset = k.get("offset_xi_lambda0") * cfg.wavelength;

        const bool over = k.has("detuning_over_gamma");
        const bool abs = k.has("detuning_rad_s");
        if (over == abs)
            throw ValidationError("detuning_over_gamma",
                                  "exactly one of detuning_over_gamma and detuning_rad_s must be given");
        if (k.has("sideband_over_gamma") && k.has("sideband_rad_s"))
            throw ValidationError("sideband_over_gamma", "give at most one of sideband_over_gamma and sideband_rad_s");

        EffectiveCavity cavity;
        try {
            cavity = effective_cavity(cfg);
        } catch (const NoDarkPort& e) {
            throw ValidationError("bs_asymmetry", e.what());
        } catch (const std::invalid_argument& e) {
            throw ValidationError("offset_xi_lambda0", e.what());
        }
        const double detuning = over ? k.get("detuning_over_gamma") * cavity.linewidth : k.get("detuning_rad_s");
        if (!std::isfinite(detuning)) throw ValidationError(over ? "detuning_over_gamma" : "detuning_rad_s", "not finite");
        cfg.srm_detuning = detuning - cavity.membrane_detuning;

        ResolvedPoint p;
        p.cavity = cavity.detuned(detuning);
        p.interferometer = cfg;

        if (k.has("mass_kg")) {
            MechanicalOscillator osc;
            osc.mass = positive("mass_kg");
            osc.frequency = two_pi * k.get("mech_freq_hz");
            osc.damping = two_pi * k.get("mech_damping_hz");
            if (!(osc.frequency >= 0.0)) throw ValidationError("mech_freq_hz", "must be non-negative");
            if (!(osc.damping >= 0.0)) throw ValidationError("mech_damping_hz", "must be non-negative");
            p.oscillator = osc;
        }
        if (k.has("sideband_over_gamma"))
            p.omega = k.get("sideband_over_gamma") * cavity.linewidth;
        else if (k.has("sideband_rad_s"))
            p.omega = k.get("sideband_rad_s");
        else
            p.omega = two_pi * k.get("mech_freq_hz");
        if (!std::isfinite(p.omega)) throw ValidationError("sideband_rad_s", "not finite");
        return p;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view text, std::size_t line) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
        throw ParseError(line, "expected a number, got '" + std::string(text) + "'");
    return v;
}

inline bool parse_bool(std::string_view text, std::size_t line) {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw ParseError(line, "expected true or false, got '" + std::string(text) + "'");
}

} // namespace detail

/// Parses configuration text. Unknown sections and keys, malformed lines and duplicate keys
/// are ParseErrors; semantically invalid values are ValidationErrors.
inline RunConfig parse_config(std::istream& in) {
    RunConfig rc;
    enum class Section { none, interferometer, oscillator, sweep, output } section = Section::none;
    std::map<std::string, std::size_t> sweep_seen;
    std::map<std::string, std::size_t> output_seen;
    std::map<std::string, std::size_t> physical_seen;

    auto finish_sweep = [&]() {
        if (section != Section::sweep) return;
        SweepSpec& s = rc.sweeps.back();
        for (const char* required : {"variable", "start", "stop", "points"})
            if (!sweep_seen.count(required))
                throw ValidationError(std::string("sweep.") + required, "missing in sweep block at line " +
                                                                        std::to_string(s.line));
    };

    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text(raw);
        if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = detail::trim(text);
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') throw ParseError(line, "unterminated section header");
            const std::string name(detail::trim(text.substr(1, text.size() - 2)));
            finish_sweep();
            if (name == "interferometer") {
                section = Section::interferometer;
            } else if (name == "oscillator") {
                section = Section::oscillator;
            } else if (name == "sweep") {
                section = Section::sweep;
                rc.sweeps.emplace_back();
                rc.sweeps.back().line = line;
                sweep_seen.clear();
            } else if (name == "output") {
                section = Section::output;
            } else {
                throw ParseError(line, "unknown section [" + name + "]");
            }
            continue;
        }

        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ParseError(line, "expected 'key = value'");
        const std::string key(detail::trim(text.substr(0, eq)));
        const std::string_view value = detail::trim(text.substr(eq + 1));
        if (key.empty()) throw ParseError(line, "empty key");
        if (value.empty()) throw ParseError(line, "empty value for '" + key + "'");

        auto once = [&](std::map<std::string, std::size_t>& scope) {
            if (auto it = scope.find(key); it != scope.end())
                throw ParseError(line, "duplicate key '" + key + "' (first given on line " +
                                           std::to_string(it->second) + ")");
            scope[key] = line;
        };

        switch (section) {
        case Section::none:
            throw ParseError(line, "key '" + key + "' outside of any section");
        case Section::interferometer:
        case Section::oscillator: {
            const auto& allowed = section == Section::interferometer ? PhysicalKeys::interferometer_keys()
                                                                     : PhysicalKeys::oscillator_keys();
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                throw ParseError(line, "unknown key '" + key + "'");
            once(physical_seen);
            rc.keys.set(key, detail::parse_number(value, line));
            break;
        }
        case Section::sweep: {
            once(sweep_seen);
            SweepSpec& s = rc.sweeps.back();
            if (key == "variable") {
                s.variable = std::string(value);
            } else if (key == "start") {
                s.start = detail::parse_number(value, line);
            } else if (key == "stop") {
                s.stop = detail::parse_number(value, line);
            } else if (key == "points") {
                const double p = detail::parse_number(value, line);
                if (p != std::floor(p) || p < 2.0 || p > 1e8) throw ValidationError("points", "must be an integer >= 2");
                s.points = static_cast<std::size_t>(p);
            } else if (key == "scale") {
                if (value == "lin") s.scale = SweepScale::lin;
                else if (value == "log") s.scale = SweepScale::log;
                else throw ValidationError("scale", "must be lin or log");
            } else {
                throw ParseError(line, "unknown key '" + key + "'");
            }
            break;
        }
        case Section::output:
            once(output_seen);
            if (key == "path") {
                rc.output.path = std::string(value);
            } else if (key == "format") {
                if (value == "csv") rc.output.format = OutputFormat::csv;
                else if (value == "json") rc.output.format = OutputFormat::json;
                else throw ValidationError("format", "must be csv or json");
            } else if (key == "normalize") {
                rc.output.normalize = detail::parse_bool(value, line);
            } else {
                throw ParseError(line, "unknown key '" + key + "'");
            }
            break;
        }
    }
    finish_sweep();

    for (const SweepSpec& s : rc.sweeps) {
        if (!PhysicalKeys::is_physical(s.variable))
            throw ValidationError("variable", "'" + s.variable + "' is not a physical key");
        if (s.variable == "dark_port_index") throw ValidationError("variable", "dark_port_index cannot be swept");
        if (!std::isfinite(s.start) || !std::isfinite(s.stop)) throw ValidationError("start", "must be finite");
        if (s.scale == SweepScale::log && !(s.start > 0.0 && s.stop > 0.0))
            throw ValidationError("scale", "log sweeps need positive start and stop");
    }
    for (std::size_t i = 0; i < rc.sweeps.size(); ++i)
        for (std::size_t j = i + 1; j < rc.sweeps.size(); ++j)
            if (rc.sweeps[i].variable == rc.sweeps[j].variable)
                throw ValidationError("variable", "'" + rc.sweeps[i].variable + "' swept twice");

    // Semantic validation of the operating point at both ends of every sweep.
    std::vector<RunConfig::Override> ends = rc.sweep_starts();
    (void)rc.resolve(ends);
    for (std::size_t i = 0; i < rc.sweeps.size(); ++i) {
        ends[i].second = rc.sweeps[i].stop;
        (void)rc.resolve(ends);
        ends[i].second = rc.sweeps[i].start;
    }
    return rc;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
    return parse_config(in);
}

} // namespace ospring

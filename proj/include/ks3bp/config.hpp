#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ks3bp/dynamics.hpp"
#include "ks3bp/frames.hpp"
#include "ks3bp/system.hpp"

namespace ks3bp {

/// Sectioned key-value configuration, INI style:
///   [section]
///   key = value   # comment
class Config {
public:
    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str());
    }

    static Config from_string(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error("config line " + std::to_string(lineno) +
                                             ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            cfg.values_[section + "." + key] = val;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw std::runtime_error("missing config key: " + key);
        return it->second;
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    double get_double(const std::string& key) const { return parse_double(key, get_string(key)); }
    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : parse_double(key, it->second);
    }
    long get_int(const std::string& key, long fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const long v = std::stol(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config key " + key + ": not an integer: " + it->second);
        }
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }
    static double parse_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing characters");
            return x;
        } catch (const std::exception&) {
            throw std::runtime_error("config key " + key + ": not a number: " + v);
        }
    }

    std::map<std::string, std::string> values_;
};

/// A fully assembled run scenario: system, admissible initial condition and
/// the propagation/indicator settings shared by the drivers.
struct Scenario {
    SystemParams sys{};
    CartesianState initial{}; // rotating-pulsating frame, Phi = -H
    std::string mode = "ks";  // ks | cartesian | switching

    double step_ks = 3.14159265358979323846e-3;       // proper-time step
    double step_cart = 2.0 * 3.14159265358979323846e-5; // anomaly step
    double s_back = 0.0;  // backward proper-time target (<= 0), 0 = disabled
    double s_fwd = 0.0;   // forward proper-time target
    bool has_s_span = false;
    double f_target = 0.0; // forward anomaly target
    bool has_f_target = false;
    double far_distance = 1.0; // far-field threshold for the encounter protocol

    double lambda = 0.0;       // chi window scale (0 -> conventional Hill radius)
    double f_span = 0.0;       // indicator propagation span in anomaly
    double jump_threshold = 0.5; // minimal mFLI increment counted as a jump

    // grid section (scan driver)
    bool has_grid = false;
    double x_min = 0.0, x_max = 0.0;
    double vx_min = 0.0, vx_max = 0.0;
    long nx = 0, ny = 0;

    double gm_helio() const { return 1.0 - sys.mu; }
    double chi_lambda() const {
        return lambda > 0.0 ? lambda : sys.hill_radius_conventional();
    }
};

/// Build the rotating-pulsating initial state from heliocentric elements.
inline CartesianState state_from_elements(const OrbitalElements& el, double f0,
                                          const SystemParams& sys, double gm) {
    const InertialState helio = elements_to_cartesian(el, gm);
    const InertialState sun = primary_inertial(f0, sys);
    CartesianState c = inertial_to_rotating({helio.R + sun.R, helio.V + sun.V}, f0, sys);
    c.Phi = -hamiltonian_cartesian(c, sys);
    return c;
}

/// Assemble a scenario from a parsed configuration.
inline Scenario load_scenario(const Config& cfg) {
    Scenario sc;
    if (cfg.has("system.preset")) {
        sc.sys = SystemParams::preset(cfg.get_string("system.preset"));
    } else {
        sc.sys = {cfg.get_double("system.mu"), cfg.get_double("system.eps")};
    }
    sc.sys.validate();

    const std::string kind = cfg.get_string("initial.kind", "cartesian");
    const double f0 = cfg.get_double("initial.f0", 0.0);
    if (kind == "cartesian") {
        sc.initial.r = {cfg.get_double("initial.x"), cfg.get_double("initial.y", 0.0),
                        cfg.get_double("initial.z", 0.0)};
        sc.initial.p = {cfg.get_double("initial.px"), cfg.get_double("initial.py"),
                        cfg.get_double("initial.pz", 0.0)};
        sc.initial.f = f0;
        sc.initial.Phi = -hamiltonian_cartesian(sc.initial, sc.sys);
    } else if (kind == "elements") {
        OrbitalElements el{cfg.get_double("initial.a"),     cfg.get_double("initial.e"),
                           cfg.get_double("initial.inc", 0.0), cfg.get_double("initial.omega", 0.0),
                           cfg.get_double("initial.node", 0.0), cfg.get_double("initial.nu")};
        const double gm = cfg.get_double("initial.gm", 1.0 - sc.sys.mu);
        sc.initial = state_from_elements(el, f0, sc.sys, gm);
    } else {
        throw std::runtime_error("initial.kind must be cartesian or elements");
    }

    sc.mode = cfg.get_string("propagation.mode", "ks");
    if (sc.mode != "ks" && sc.mode != "cartesian" && sc.mode != "switching")
        throw std::runtime_error("propagation.mode must be ks, cartesian or switching");
    sc.step_ks = cfg.get_double("propagation.step_ks", sc.step_ks);
    sc.step_cart = cfg.get_double("propagation.step_cart", sc.step_cart);
    if (cfg.has("propagation.s_back") || cfg.has("propagation.s_fwd")) {
        sc.s_back = cfg.get_double("propagation.s_back", 0.0);
        sc.s_fwd = cfg.get_double("propagation.s_fwd", 0.0);
        sc.has_s_span = true;
    }
    if (cfg.has("propagation.f_target")) {
        sc.f_target = cfg.get_double("propagation.f_target");
        sc.has_f_target = true;
    }
    sc.far_distance = cfg.get_double("propagation.far_distance", 1.0);

    sc.lambda = cfg.get_double("indicator.lambda", 0.0);
    sc.f_span = cfg.get_double("indicator.f_span", 0.0);
    sc.jump_threshold = cfg.get_double("indicator.jump_threshold", 0.5);

    if (cfg.has("grid.nx")) {
        sc.has_grid = true;
        sc.x_min = cfg.get_double("grid.x_min");
        sc.x_max = cfg.get_double("grid.x_max");
        sc.vx_min = cfg.get_double("grid.vx_min");
        sc.vx_max = cfg.get_double("grid.vx_max");
        sc.nx = cfg.get_int("grid.nx", 0);
        sc.ny = cfg.get_int("grid.ny", 0);
        if (sc.nx < 2 || sc.ny < 2) throw std::runtime_error("grid.nx/grid.ny must be >= 2");
    }
    return sc;
}

} // namespace ks3bp

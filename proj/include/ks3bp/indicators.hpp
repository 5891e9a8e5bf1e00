#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ks3bp/dynamics.hpp"
#include "ks3bp/frames.hpp"
#include "ks3bp/rk6.hpp"
#include "ks3bp/system.hpp"

namespace ks3bp {

/// Cosine-taper encounter window on the Cartesian distance to the second
/// primary: 1 inside lambda/2, 0 outside 3 lambda/2, smooth taper between.
inline double chi_window(double dist, double lambda) {
    if (dist <= 0.5 * lambda) return 1.0;
    if (dist > 1.5 * lambda) return 0.0;
    return 0.5 * (1.0 + std::cos((dist / lambda - 0.5) * 3.14159265358979323846));
}

/// Settings for the regularized chaos-indicator propagation.
struct IndicatorConfig {
    double lambda;                    // chi window scale, typically (mu/3)^(1/3)
    double renorm_threshold = 1e100;  // tangent renormalization trigger
};

/// Result of one indicator propagation.
struct IndicatorResult {
    double rfli = 0.0;        // running max of log10 |w(s)| / |w(0)|
    double mfli = 0.0;        // running max of the windowed growth integral
    double log10_w = 0.0;     // final log10 |w|
    double s_final = 0.0;
    double f_final = 0.0;
    std::array<double, 10> state{}; // final regularized state
    std::size_t iterations = 0;
    std::size_t renormalizations = 0;
};

/// Per-step sample of the indicator run (for series output).
struct IndicatorSample {
    double s, f, d2, log10_w, rfli, mfli, gamma;
};

namespace detail {

/// Combined 19-dimensional field: regularized state (10), tangent vector on
/// the (u,U) block (8) and the windowed growth integral (1).
inline std::array<double, 19> indicator_field(const std::array<double, 19>& y,
                                              const SystemParams& sys, double lambda) {
    std::array<double, 10> base;
    for (int i = 0; i < 10; ++i) base[i] = y[i];
    const auto dbase = vector_field_ks(base, sys);
    const Mat8 X = variational_matrix(base, sys);

    std::array<double, 19> dy{};
    for (int i = 0; i < 10; ++i) dy[i] = dbase[i];
    double wdw = 0.0, ww = 0.0;
    for (int i = 0; i < 8; ++i) {
        double xi = 0.0;
        for (int j = 0; j < 8; ++j) xi += X[i][j] * y[10 + j];
        dy[10 + i] = xi;
        wdw += y[10 + i] * xi;
        ww += y[10 + i] * y[10 + i];
    }
    const double d2 = base[0] * base[0] + base[1] * base[1] + base[2] * base[2] + base[3] * base[3];
    dy[18] = chi_window(d2, lambda) * wdw / ww;
    return dy;
}

} // namespace detail

/// Default isotropic unit tangent seed on the (u,U) block.
inline std::array<double, 8> default_tangent_seed() {
    std::array<double, 8> w;
    const double v = 1.0 / std::sqrt(8.0);
    for (auto& x : w) x = v;
    return w;
}

/// Propagate a regularized state together with its tangent dynamics from the
/// initial node until the extended anomaly phi reaches f_target, accumulating
/// the two chaos indicators.  The tangent vector is renormalized whenever its
/// norm exceeds the configured threshold; the log magnitude is carried
/// separately so the indicators are unaffected.
template <class Observer = void*>
IndicatorResult propagate_indicators(const std::array<double, 10>& y0,
                                     const std::array<double, 8>& w0, const SystemParams& sys,
                                     const IndicatorConfig& cfg, double ds, double f_target,
                                     std::size_t max_steps,
                                     std::vector<IndicatorSample>* series = nullptr,
                                     double phi_ref = 0.0) {
    if (!(ds > 0.0)) throw std::invalid_argument("propagate_indicators: ds must be positive");
    std::array<double, 19> y{};
    for (int i = 0; i < 10; ++i) y[i] = y0[i];
    double w0n = 0.0;
    for (int i = 0; i < 8; ++i) {
        y[10 + i] = w0[i];
        w0n += w0[i] * w0[i];
    }
    const double log10_w0 = 0.5 * std::log10(w0n);
    auto field = [&sys, &cfg](double, const std::array<double, 19>& yy) {
        return detail::indicator_field(yy, sys, cfg.lambda);
    };

    IndicatorResult res;
    double s = 0.0;
    double log_offset = 0.0; // accumulated log10 of stripped normalizations
    const double thr2 = cfg.renorm_threshold * cfg.renorm_threshold;

    auto record = [&](double si, const std::array<double, 19>& yi) {
        double ww = 0.0;
        for (int i = 0; i < 8; ++i) ww += yi[10 + i] * yi[10 + i];
        const double lw = log_offset + 0.5 * std::log10(ww);
        res.log10_w = lw;
        res.rfli = std::max(res.rfli, lw - log10_w0);
        res.mfli = std::max(res.mfli, yi[18]);
        if (series) {
            const double d2 = yi[0] * yi[0] + yi[1] * yi[1] + yi[2] * yi[2] + yi[3] * yi[3];
            series->push_back({si, yi[4], d2, lw, res.rfli, res.mfli,
                               gamma_coefficient(yi[4], yi[9] - phi_ref, sys)});
        }
    };

    record(s, y);
    if (y[4] >= f_target) {
        res.s_final = s;
        res.f_final = y[4];
        for (int i = 0; i < 10; ++i) res.state[i] = y[i];
        return res;
    }

    bool done = false;
    for (std::size_t it = 0; it < max_steps && !done; ++it) {
        std::array<double, 19> y_next = rk6_step(field, s, y, ds);
        ++res.iterations;
        if (y_next[4] >= f_target) {
            // Redo the final step with a secant-adapted size to land on the
            // target anomaly exactly.
            double lo = 0.0, hi = ds;
            double g_lo = y[4] - f_target, g_hi = y_next[4] - f_target;
            for (int k = 0; k < 60 && std::abs(g_hi) > 1e-13; ++k) {
                double hn = hi - g_hi * (hi - lo) / (g_hi - g_lo);
                if (!std::isfinite(hn) || hn <= 0.0 || hn > ds) hn = 0.5 * (lo + hi);
                const auto yc = rk6_step(field, s, y, hn);
                lo = hi;
                g_lo = g_hi;
                hi = hn;
                g_hi = yc[4] - f_target;
                y_next = yc;
            }
            s += hi;
            y = y_next;
            done = true;
        } else {
            s += ds;
            y = y_next;
        }
        double ww = 0.0;
        for (int i = 0; i < 8; ++i) ww += y[10 + i] * y[10 + i];
        if (ww > thr2) {
            const double wn = std::sqrt(ww);
            for (int i = 0; i < 8; ++i) y[10 + i] /= wn;
            log_offset += std::log10(wn);
            ++res.renormalizations;
        }
        record(s, y);
    }
    if (!done) throw std::runtime_error("propagate_indicators: anomaly target not reached");
    res.s_final = s;
    res.f_final = y[4];
    for (int i = 0; i < 10; ++i) res.state[i] = y[i];
    return res;
}

/// Tisserand parameter of heliocentric elements: 1/a + 2 cos(i) sqrt(a (1-e^2)).
inline double tisserand(const OrbitalElements& el) {
    return 1.0 / el.a + 2.0 * std::cos(el.i) * std::sqrt(el.a * (1.0 - el.e * el.e));
}

/// Tisserand parameter of a rotating-pulsating state, through the
/// heliocentric osculating elements (Sun gravitational parameter gm_sun).
inline double tisserand(const CartesianState& c, const SystemParams& sys, double gm_sun) {
    const InertialState bary = rotating_to_inertial(c, sys);
    const InertialState sun = primary_inertial(c.f, sys);
    const InertialState helio{bary.R - sun.R, bary.V - sun.V};
    return tisserand(cartesian_to_elements(helio, gm_sun));
}

} // namespace ks3bp

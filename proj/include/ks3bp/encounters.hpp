#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ks3bp/dynamics.hpp"
#include "ks3bp/rk6.hpp"
#include "ks3bp/system.hpp"

namespace ks3bp {

/// One passage through the Hill sphere d2 <= mu^(1/3) of the second primary.
///
/// The hyperbolicity coefficient Gamma_s is evaluated with the action
/// measured relative to the admissible initial datum, Gamma(phi, Phi - Phi_ref):
/// on the zero set of the regularized Hamiltonian this isolates the slow
/// drift of the coefficient from the constant energy offset and makes the
/// entry value comparable across scenarios.
struct EncounterRecord {
    double s_entry = 0.0, f_entry = 0.0;
    double s_exit = 0.0, f_exit = 0.0;
    double s_closest = 0.0, f_closest = 0.0;
    double d2_min = 0.0;
    double gamma_entry = 0.0;
    double gamma_min = 0.0, gamma_max = 0.0;
    double gamma_drift_max = 0.0;  // max |dGamma/ds| observed inside
    double gamma_drift_bound = 0.0; // analytic bound 5 eps mu / (1-eps)^2
    bool hyperbolic = false;        // Gamma stayed in [Gamma0/2, 3 Gamma0/2], Gamma0 > 0
    bool open_start = false;        // transit truncated by the data window
    bool open_end = false;
};

namespace detail {
inline double ks_r2(const std::array<double, 10>& y) {
    return y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
}
} // namespace detail

/// Analytic bound on the proper-time drift rate of Gamma during a transit.
inline double gamma_drift_bound(const SystemParams& sys) {
    return 5.0 * sys.eps * sys.mu / ((1.0 - sys.eps) * (1.0 - sys.eps));
}

/// Scan a stored regularized trajectory (nodes ordered by s) for Hill-sphere
/// transits.  Crossings are localized by re-integrating the bracketing step
/// with bisection on the sub-step size; phi_ref is the action datum for the
/// Gamma diagnostic (the admissible Phi of the scenario's initial condition).
template <class Field>
std::vector<EncounterRecord> detect_transits(Field&& field, const std::vector<double>& s,
                                             const std::vector<std::array<double, 10>>& y,
                                             const SystemParams& sys, double phi_ref) {
    std::vector<EncounterRecord> out;
    if (s.size() < 2) return out;
    const double rH = sys.hill_radius_q();
    auto gam = [&](const std::array<double, 10>& yy) {
        return gamma_coefficient(yy[4], yy[9] - phi_ref, sys);
    };

    EncounterRecord cur;
    bool inside = detail::ks_r2(y.front()) < rH;
    std::size_t inside_count = 0;
    double prev_gamma = 0.0, prev_s = 0.0;
    if (inside) {
        cur.open_start = true;
        cur.s_entry = s.front();
        cur.f_entry = y.front()[4];
        cur.gamma_entry = gam(y.front());
        cur.gamma_min = cur.gamma_max = cur.gamma_entry;
        cur.d2_min = detail::ks_r2(y.front());
        cur.s_closest = s.front();
        cur.f_closest = y.front()[4];
        prev_gamma = cur.gamma_entry;
        prev_s = s.front();
        inside_count = 1;
    }

    auto absorb = [&](double si, const std::array<double, 10>& yi) {
        const double g = gam(yi);
        const double r2 = detail::ks_r2(yi);
        if (inside_count == 0) {
            cur.gamma_min = cur.gamma_max = g;
            cur.d2_min = r2;
            cur.s_closest = si;
            cur.f_closest = yi[4];
        } else {
            cur.gamma_min = std::min(cur.gamma_min, g);
            cur.gamma_max = std::max(cur.gamma_max, g);
            if (r2 < cur.d2_min) {
                cur.d2_min = r2;
                cur.s_closest = si;
                cur.f_closest = yi[4];
            }
            if (si != prev_s) {
                cur.gamma_drift_max =
                    std::max(cur.gamma_drift_max, std::abs((g - prev_gamma) / (si - prev_s)));
            }
        }
        prev_gamma = g;
        prev_s = si;
        ++inside_count;
    };

    auto finalize = [&](void) {
        cur.gamma_drift_bound = gamma_drift_bound(sys);
        cur.hyperbolic = cur.gamma_entry > 0.0 && cur.gamma_min >= 0.5 * cur.gamma_entry &&
                         cur.gamma_max <= 1.5 * cur.gamma_entry;
        out.push_back(cur);
        cur = EncounterRecord{};
        inside_count = 0;
    };

    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double r2a = detail::ks_r2(y[i]), r2b = detail::ks_r2(y[i + 1]);
        const bool in_a = r2a < rH, in_b = r2b < rH;
        if (in_a == in_b) {
            if (inside) absorb(s[i + 1], y[i + 1]);
            continue;
        }
        // Localize the crossing inside [s_i, s_{i+1}].
        const auto hit = locate_crossing(field, s[i], y[i], s[i + 1] - s[i],
                                         [&](const std::array<double, 10>& yy) {
                                             return detail::ks_r2(yy) - rH;
                                         });
        if (!in_a && in_b) {
            // Entry.
            inside = true;
            cur.s_entry = hit.t;
            cur.f_entry = hit.y[4];
            cur.gamma_entry = gam(hit.y);
            absorb(hit.t, hit.y);
            absorb(s[i + 1], y[i + 1]);
        } else {
            // Exit.
            absorb(hit.t, hit.y);
            cur.s_exit = hit.t;
            cur.f_exit = hit.y[4];
            inside = false;
            finalize();
        }
    }
    if (inside && inside_count > 0) {
        cur.open_end = true;
        cur.s_exit = s.back();
        cur.f_exit = y.back()[4];
        finalize();
    }
    return out;
}

} // namespace ks3bp

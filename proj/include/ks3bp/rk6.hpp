#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ks3bp/system.hpp"

namespace ks3bp {

/// Butcher tableau of Luther's explicit 7-stage, order-6 Runge-Kutta scheme.
namespace luther {

inline constexpr double rt21 = 4.58257569495584000680; // sqrt(21)

inline constexpr std::array<double, 7> c = {
    0.0, 1.0, 0.5, 2.0 / 3.0, (7.0 - rt21) / 14.0, (7.0 + rt21) / 14.0, 1.0};

inline constexpr std::array<std::array<double, 6>, 6> a = {{
    {1.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {3.0 / 8.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0},
    {8.0 / 27.0, 2.0 / 27.0, 8.0 / 27.0, 0.0, 0.0, 0.0},
    {3.0 * (3.0 * rt21 - 7.0) / 392.0, -8.0 * (7.0 - rt21) / 392.0, 48.0 * (7.0 - rt21) / 392.0,
     -3.0 * (21.0 - rt21) / 392.0, 0.0, 0.0},
    {-5.0 * (231.0 + 51.0 * rt21) / 1960.0, -40.0 * (7.0 + rt21) / 1960.0, -320.0 * rt21 / 1960.0,
     3.0 * (21.0 + 121.0 * rt21) / 1960.0, 392.0 * (6.0 + rt21) / 1960.0, 0.0},
    {15.0 * (22.0 + 7.0 * rt21) / 180.0, 120.0 / 180.0, 40.0 * (7.0 * rt21 - 5.0) / 180.0,
     -63.0 * (3.0 * rt21 - 2.0) / 180.0, -14.0 * (49.0 + 9.0 * rt21) / 180.0,
     70.0 * (7.0 - rt21) / 180.0},
}};

inline constexpr std::array<double, 7> b = {9.0 / 180.0,  0.0, 64.0 / 180.0, 0.0,
                                            49.0 / 180.0, 49.0 / 180.0, 9.0 / 180.0};

} // namespace luther

/// One fixed step of Luther's RK6.  Field signature: f(t, y) -> dy/dt.
template <std::size_t N, class Field>
std::array<double, N> rk6_step(Field&& field, double t, const std::array<double, N>& y, double h) {
    std::array<std::array<double, N>, 7> k;
    k[0] = field(t, y);
    for (int st = 1; st < 7; ++st) {
        std::array<double, N> yi = y;
        for (int j = 0; j < st; ++j) {
            const double w = h * luther::a[st - 1][j];
            if (w == 0.0) continue;
            for (std::size_t n = 0; n < N; ++n) yi[n] += w * k[j][n];
        }
        k[st] = field(t + luther::c[st] * h, yi);
    }
    std::array<double, N> out = y;
    for (int st = 0; st < 7; ++st) {
        const double w = h * luther::b[st];
        if (w == 0.0) continue;
        for (std::size_t n = 0; n < N; ++n) out[n] += w * k[st][n];
    }
    return out;
}

/// Result of a propagation: final node and the number of integration steps
/// actually taken (full fixed steps plus the adapted endpoint step, if any).
template <std::size_t N>
struct PropagationResult {
    double t;
    std::array<double, N> y;
    std::size_t iterations;
};

namespace detail {
template <std::size_t N>
struct NullObserver {
    void operator()(double, const std::array<double, N>&) const {}
};
} // namespace detail

/// Propagate to an exact value of the independent variable with fixed steps
/// of magnitude |h|, finishing with one shortened endpoint step when the
/// span is not an integer multiple of the step.  The observer is called at
/// the initial node and after every accepted step.
template <std::size_t N, class Field, class Observer = detail::NullObserver<N>>
PropagationResult<N> propagate_to(Field&& field, double t0, const std::array<double, N>& y0,
                                  double step, double t_target, Observer&& obs = Observer{}) {
    if (!(step > 0.0)) throw std::invalid_argument("propagate_to: step must be positive");
    const double span = std::abs(t_target - t0);
    const double dir = (t_target >= t0) ? 1.0 : -1.0;
    const double rel = 1e-9;
    const std::size_t n_full = static_cast<std::size_t>(std::floor(span / step + rel));

    PropagationResult<N> res{t0, y0, 0};
    obs(res.t, res.y);
    for (std::size_t i = 0; i < n_full; ++i) {
        res.y = rk6_step(field, res.t, res.y, dir * step);
        res.t = t0 + dir * step * static_cast<double>(i + 1);
        ++res.iterations;
        obs(res.t, res.y);
    }
    const double residual = span - step * static_cast<double>(n_full);
    if (residual > rel * std::max(1.0, span)) {
        res.y = rk6_step(field, res.t, res.y, dir * residual);
        res.t = t_target;
        ++res.iterations;
        obs(res.t, res.y);
    } else {
        res.t = t_target;
    }
    return res;
}

/// Propagate a fixed number of steps of signed size h.
template <std::size_t N, class Field, class Observer = detail::NullObserver<N>>
PropagationResult<N> propagate_steps(Field&& field, double t0, const std::array<double, N>& y0,
                                     double h, std::size_t n_steps, Observer&& obs = Observer{}) {
    PropagationResult<N> res{t0, y0, 0};
    obs(res.t, res.y);
    for (std::size_t i = 0; i < n_steps; ++i) {
        res.y = rk6_step(field, res.t, res.y, h);
        res.t = t0 + h * static_cast<double>(i + 1);
        ++res.iterations;
        obs(res.t, res.y);
    }
    return res;
}

/// Propagate with fixed steps of signed size h until the monitored state
/// coordinate reaches `target` (assumed monotone near the end), then redo
/// the final step with a secant-adapted size so the coordinate lands on the
/// target to |residual| <= tol.  Used to stop a regularized integration at a
/// prescribed true anomaly.
template <std::size_t N, class Field, class Observer = detail::NullObserver<N>>
PropagationResult<N> propagate_to_coordinate(Field&& field, double t0, const std::array<double, N>& y0,
                                             double h, std::size_t coord, double target,
                                             std::size_t max_steps, Observer&& obs = Observer{},
                                             double tol = 1e-13) {
    PropagationResult<N> res{t0, y0, 0};
    obs(res.t, res.y);
    const double g0 = y0[coord] - target;
    if (g0 == 0.0) return res;
    // Already at or past the target in the direction of motion: nothing to do.
    const double rate = field(t0, y0)[coord] * ((h >= 0.0) ? 1.0 : -1.0);
    if (g0 * rate > 0.0) return res;
    const double sign0 = (g0 < 0.0) ? 1.0 : -1.0;

    double t_prev = t0;
    std::array<double, N> y_prev = y0;
    bool crossed = false;
    for (std::size_t i = 0; i < max_steps; ++i) {
        const std::array<double, N> y_next = rk6_step(field, res.t, res.y, h);
        const double t_next = res.t + h;
        ++res.iterations;
        if (sign0 * (y_next[coord] - target) >= 0.0) {
            t_prev = res.t;
            y_prev = res.y;
            res.t = t_next;
            res.y = y_next;
            crossed = true;
            break;
        }
        res.t = t_next;
        res.y = y_next;
        obs(res.t, res.y);
    }
    if (!crossed) throw std::runtime_error("propagate_to_coordinate: target not reached");

    // Secant iteration on the size of the final step, bisection fallback.
    double lo = 0.0, hi = h;
    double g_lo = y_prev[coord] - target;
    double g_hi = res.y[coord] - target;
    double hc = h;
    std::array<double, N> yc = res.y;
    for (int it = 0; it < 60; ++it) {
        if (std::abs(g_hi) <= tol) break;
        double hn = hi - g_hi * (hi - lo) / (g_hi - g_lo);
        if (!std::isfinite(hn) || hn == hi) hn = 0.5 * (lo + hi);
        // Keep the iterate inside the bracket [0, h] measured along h.
        if ((hn - 0.0) * (hn - h) > 0.0) hn = 0.5 * (lo + hi);
        yc = rk6_step(field, t_prev, y_prev, hn);
        const double g = yc[coord] - target;
        lo = hi;
        g_lo = g_hi;
        hi = hn;
        g_hi = g;
        hc = hn;
        res.y = yc;
    }
    res.t = t_prev + hc;
    obs(res.t, res.y);
    return res;
}

/// Localize a sign change of a scalar event function within one step.
/// Bisection on the size of a sub-step taken from the left node; the event
/// value at the left node and at step size h_max must bracket zero.
/// Returns the sub-step node where |event| is resolved to the bracket width
/// tolerance in step size.
template <std::size_t N, class Field, class Event>
PropagationResult<N> locate_crossing(Field&& field, double t_left, const std::array<double, N>& y_left,
                                     double h_max, Event&& event, double tol = 1e-14) {
    double g_left = event(y_left);
    std::array<double, N> y_right = rk6_step(field, t_left, y_left, h_max);
    double g_right = event(y_right);
    if (g_left == 0.0) return {t_left, y_left, 0};
    if (g_left * g_right > 0.0) throw std::invalid_argument("locate_crossing: no sign change in bracket");

    double lo = 0.0, hi = h_max;
    std::array<double, N> y_mid = y_right;
    std::size_t iters = 1;
    while (std::abs(hi - lo) > tol * std::max(1.0, std::abs(h_max))) {
        const double mid = 0.5 * (lo + hi);
        y_mid = rk6_step(field, t_left, y_left, mid);
        ++iters;
        const double g_mid = event(y_mid);
        if (g_left * g_mid <= 0.0) {
            hi = mid;
            y_right = y_mid;
        } else {
            lo = mid;
        }
    }
    y_mid = rk6_step(field, t_left, y_left, hi);
    return {t_left + hi, y_mid, iters};
}

/// Step-by-step sample storage observer.
template <std::size_t N>
struct TrajectoryRecorder {
    std::vector<double> t;
    std::vector<std::array<double, N>> y;
    void operator()(double ti, const std::array<double, N>& yi) {
        t.push_back(ti);
        y.push_back(yi);
    }
};

} // namespace ks3bp

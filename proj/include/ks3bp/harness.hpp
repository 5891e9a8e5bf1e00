#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "ks3bp/config.hpp"
#include "ks3bp/dynamics.hpp"
#include "ks3bp/encounters.hpp"
#include "ks3bp/frames.hpp"
#include "ks3bp/indicators.hpp"
#include "ks3bp/io.hpp"
#include "ks3bp/ks_map.hpp"
#include "ks3bp/rk6.hpp"

namespace ks3bp {

// ---------------------------------------------------------------------------
// Formulation comparison (regularized vs Cartesian on one benchmark arc)
// ---------------------------------------------------------------------------

struct CompareRow {
    std::string mode;  // "ks" or "cartesian"
    double step;
    std::size_t iterations;  // both legs combined
    double f_minus, f_plus;  // anomalies reached at the two endpoints
    double r_minus, r_plus;  // barycentric distances there
    double drift_minus, drift_plus; // |extended-Hamiltonian residual|
};

/// Two-leg benchmark protocol: integrate backward over the prescribed span,
/// then forward from the backward endpoint across the whole span.  The
/// regularized runs use proper-time targets (s_back, s_fwd); the Cartesian
/// runs then target the anomalies reached by the reference regularized run.
struct CompareReport {
    std::vector<CompareRow> rows;
    double f_minus_ref = 0.0, f_plus_ref = 0.0; // anomaly targets of the Cartesian legs
};

inline CompareReport run_compare(const Scenario& sc, const std::vector<double>& ks_steps,
                                 const std::vector<double>& cart_steps) {
    const SystemParams& sys = sc.sys;
    CompareReport rep;
    auto kfield = [&sys](double, const std::array<double, 10>& y) {
        return vector_field_ks(y, sys);
    };
    auto cfield = [&sys](double f, const std::array<double, 7>& y) {
        return vector_field_cartesian(f, y, sys);
    };

    const KSState k0 = lift(sc.initial, sys);
    bool have_ref = false;
    double ref_step = 0.0;
    for (double ds : ks_steps) {
        const auto back = propagate_to(kfield, 0.0, pack(k0), ds, sc.s_back);
        const auto fwd = propagate_to(kfield, back.t, back.y, ds, sc.s_fwd);
        const KSState kb = unpack_ks(back.y, back.t);
        const KSState kf = unpack_ks(fwd.y, fwd.t);
        const CartesianState cb = push_down(kb, sys);
        const CartesianState cf = push_down(kf, sys);
        CompareRow row;
        row.mode = "ks";
        row.step = ds;
        row.iterations = back.iterations + fwd.iterations;
        row.f_minus = kb.phi;
        row.f_plus = kf.phi;
        row.r_minus = norm(cb.r);
        row.r_plus = norm(cf.r);
        row.drift_minus = std::abs(hamiltonian_regularized(kb, sys) / dot(kb.u, kb.u));
        row.drift_plus = std::abs(hamiltonian_regularized(kf, sys) / dot(kf.u, kf.u));
        rep.rows.push_back(row);
        // The smallest regularized step defines the anomaly targets for the
        // Cartesian legs.
        if (!have_ref || ds < ref_step) {
            rep.f_minus_ref = row.f_minus;
            rep.f_plus_ref = row.f_plus;
            ref_step = ds;
            have_ref = true;
        }
    }
    if (!have_ref) throw std::runtime_error("run_compare: at least one regularized step required");

    for (double df : cart_steps) {
        const auto back = propagate_to(cfield, sc.initial.f, pack(sc.initial), df, rep.f_minus_ref);
        const auto fwd = propagate_to(cfield, back.t, back.y, df, rep.f_plus_ref);
        const CartesianState cb = unpack_cartesian(back.y, back.t);
        const CartesianState cf = unpack_cartesian(fwd.y, fwd.t);
        CompareRow row;
        row.mode = "cartesian";
        row.step = df;
        row.iterations = back.iterations + fwd.iterations;
        row.f_minus = back.t;
        row.f_plus = fwd.t;
        row.r_minus = norm(cb.r);
        row.r_plus = norm(cf.r);
        row.drift_minus = std::abs(hamiltonian_extended(cb, sys));
        row.drift_plus = std::abs(hamiltonian_extended(cf, sys));
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Encounter protocol
// ---------------------------------------------------------------------------

struct EncounterRunResult {
    std::vector<double> s;
    std::vector<std::array<double, 10>> traj; // regularized nodes along the forward sweep
    std::vector<EncounterRecord> records;
    double phi_ref = 0.0;
};

/// Regularized encounter sweep.  When a proper-time span is prescribed the
/// run mirrors the benchmark protocol (backward to s_back, forward to s_fwd);
/// with an anomaly target it runs forward until phi reaches it; otherwise it
/// retreats backward until the far-field distance and then sweeps forward
/// across twice the backward iteration count.
inline EncounterRunResult run_encounter(const Scenario& sc) {
    const SystemParams& sys = sc.sys;
    auto kfield = [&sys](double, const std::array<double, 10>& y) {
        return vector_field_ks(y, sys);
    };
    const KSState k0 = lift(sc.initial, sys);
    EncounterRunResult out;
    out.phi_ref = sc.initial.Phi;

    TrajectoryRecorder<10> rec;
    if (sc.has_s_span) {
        const auto back = propagate_to(kfield, 0.0, pack(k0), sc.step_ks, sc.s_back);
        propagate_to(kfield, back.t, back.y, sc.step_ks, sc.s_fwd, rec);
    } else if (sc.has_f_target) {
        const std::size_t guard = static_cast<std::size_t>(1e9);
        propagate_to_coordinate(kfield, 0.0, pack(k0), sc.step_ks, 4, sc.f_target, guard, rec);
    } else {
        // Backward to the far field, then forward across twice the steps.
        auto y = pack(k0);
        double s = 0.0;
        std::size_t n_back = 0;
        const std::size_t guard = static_cast<std::size_t>(1e8);
        while (detail::ks_r2(y) < sc.far_distance && n_back < guard) {
            y = rk6_step(kfield, s, y, -sc.step_ks);
            s -= sc.step_ks;
            ++n_back;
        }
        if (n_back >= guard) throw std::runtime_error("run_encounter: far field not reached");
        propagate_steps(kfield, s, y, sc.step_ks, 2 * n_back, rec);
    }
    out.s = std::move(rec.t);
    out.traj = std::move(rec.y);
    out.records = detect_transits(kfield, out.s, out.traj, sys, out.phi_ref);
    return out;
}

// ---------------------------------------------------------------------------
// Switching propagation (Cartesian far field, regularized inside)
// ---------------------------------------------------------------------------

struct SwitchingResult {
    CartesianState final_state{};
    std::size_t switches = 0;
    std::size_t iterations = 0;
    double max_energy_jump = 0.0; // worst |extended energy| discontinuity at a switch
};

/// Integrate to the anomaly target, switching charts at the Hill radius with
/// a +-5% hysteresis band: Cartesian -> regularized below 0.95 mu^(1/3),
/// regularized -> Cartesian above 1.05 mu^(1/3).  Switch points are localized
/// within the triggering step before the chart map is applied.
inline SwitchingResult run_switching(const Scenario& sc, double f_target) {
    const SystemParams& sys = sc.sys;
    const double rH = sys.hill_radius_q();
    const double r_lo = 0.95 * rH, r_hi = 1.05 * rH;
    auto kfield = [&sys](double, const std::array<double, 10>& y) {
        return vector_field_ks(y, sys);
    };
    auto cfield = [&sys](double f, const std::array<double, 7>& y) {
        return vector_field_cartesian(f, y, sys);
    };

    SwitchingResult res;
    CartesianState c = sc.initial;
    bool regularized = c.d2(sys) < rH;
    KSState k{};
    double s = 0.0;
    if (regularized) k = lift(c, sys);

    const std::size_t guard = static_cast<std::size_t>(1e9);
    std::size_t it = 0;
    while (it++ < guard) {
        if (regularized) {
            auto y = pack(k);
            // March in proper time until the anomaly target or the upper
            // hysteresis radius is reached.
            bool switched = false;
            while (true) {
                if (k.phi >= f_target) break;
                const auto y_next = rk6_step(kfield, s, y, sc.step_ks);
                ++res.iterations;
                if (y_next[4] >= f_target) {
                    // Adapted endpoint inside the regularized chart.
                    const auto fin = propagate_to_coordinate(kfield, s, y, sc.step_ks, 4, f_target, 4);
                    k = unpack_ks(fin.y, fin.t);
                    y = fin.y;
                    s = fin.t;
                    break;
                }
                if (detail::ks_r2(y_next) > r_hi) {
                    const auto hit = locate_crossing(kfield, s, y, sc.step_ks,
                                                     [&](const std::array<double, 10>& yy) {
                                                         return detail::ks_r2(yy) - r_hi;
                                                     });
                    k = unpack_ks(hit.y, hit.t);
                    s = hit.t;
                    y = hit.y;
                    switched = true;
                    break;
                }
                s += sc.step_ks;
                y = y_next;
                k = unpack_ks(y, s);
            }
            const double e_before = hamiltonian_regularized(k, sys) / dot(k.u, k.u);
            c = push_down(k, sys);
            const double e_after = hamiltonian_extended(c, sys);
            if (switched) {
                res.max_energy_jump = std::max(res.max_energy_jump, std::abs(e_after - e_before));
                ++res.switches;
                regularized = false;
                continue;
            }
            break; // anomaly target reached inside the regularized chart
        } else {
            auto y = pack(c);
            double f = c.f;
            bool switched = false;
            while (f < f_target) {
                const double h = std::min(sc.step_cart, f_target - f);
                const auto y_next = rk6_step(cfield, f, y, h);
                ++res.iterations;
                const CartesianState cn = unpack_cartesian(y_next, f + h);
                if (cn.d2(sys) < r_lo) {
                    const auto hit = locate_crossing(cfield, f, y, h,
                                                     [&](const std::array<double, 7>& yy) {
                                                         const double dx = yy[0] - 1.0 + sys.mu;
                                                         return dx * dx + yy[1] * yy[1] +
                                                                yy[2] * yy[2] - r_lo * r_lo;
                                                     });
                    c = unpack_cartesian(hit.y, hit.t);
                    f = hit.t;
                    switched = true;
                    break;
                }
                f += h;
                y = y_next;
                c = cn;
            }
            if (switched) {
                const double e_before = hamiltonian_extended(c, sys);
                k = lift(c, sys);
                s = 0.0;
                const double e_after = hamiltonian_regularized(k, sys) / dot(k.u, k.u);
                res.max_energy_jump = std::max(res.max_energy_jump, std::abs(e_after - e_before));
                ++res.switches;
                regularized = true;
                continue;
            }
            break;
        }
    }
    res.final_state = regularized ? push_down(k, sys) : c;
    return res;
}

// ---------------------------------------------------------------------------
// Indicator scan over a (x, vx) grid
// ---------------------------------------------------------------------------

struct ScanResult {
    Raster mfli, rfli, tisserand_initial, tisserand_final;
    std::size_t failures = 0;
};

/// Build the admissible cell state: grid coordinates replace the position x
/// and synodic velocity x' of the template state; everything else is shared.
inline CartesianState scan_cell_state(const Scenario& sc, double x, double vx) {
    CartesianState c = sc.initial;
    const Vec3 vel{vx, c.p[1] - c.r[0], c.p[2]}; // template y',z' retained
    c.r[0] = x;
    c.p = {vel[0] - c.r[1], vel[1] + c.r[0], vel[2]};
    c.Phi = -hamiltonian_cartesian(c, sc.sys);
    return c;
}

/// Regularized chaos-indicator raster over the scenario grid.  Cells are
/// processed with a work-stealing index so results are identical for any
/// thread count; failed cells carry NaN sentinels.
inline ScanResult run_scan(const Scenario& sc, int threads) {
    if (!sc.has_grid) throw std::runtime_error("run_scan: scenario has no [grid] section");
    if (threads < 1) threads = 1;
    const SystemParams sys = sc.sys;
    const long nx = sc.nx, ny = sc.ny;

    ScanResult out;
    for (Raster* r : {&out.mfli, &out.rfli, &out.tisserand_initial, &out.tisserand_final}) {
        r->nx = nx;
        r->ny = ny;
        r->x_min = sc.x_min;
        r->x_max = sc.x_max;
        r->y_min = sc.vx_min;
        r->y_max = sc.vx_max;
        r->data.assign(static_cast<std::size_t>(nx) * ny,
                       std::numeric_limits<double>::quiet_NaN());
    }
    out.mfli.name = "mfli";
    out.rfli.name = "rfli";
    out.tisserand_initial.name = "tisserand_initial";
    out.tisserand_final.name = "tisserand_final";

    const double f_target = sc.initial.f + sc.f_span;
    const IndicatorConfig icfg{sc.chi_lambda()};
    const auto w0 = default_tangent_seed();
    const std::size_t max_steps = static_cast<std::size_t>(5e3 / sc.step_ks) + 1000;

    std::atomic<long> next{0};
    std::atomic<std::size_t> failures{0};
    auto worker = [&]() {
        for (;;) {
            const long cell = next.fetch_add(1);
            if (cell >= nx * ny) return;
            const long ix = cell % nx, iy = cell / nx;
            const double x = sc.x_min + (sc.x_max - sc.x_min) * static_cast<double>(ix) /
                                            static_cast<double>(nx - 1);
            const double vx = sc.vx_min + (sc.vx_max - sc.vx_min) * static_cast<double>(iy) /
                                              static_cast<double>(ny - 1);
            try {
                const CartesianState c = scan_cell_state(sc, x, vx);
                const KSState k = lift(c, sys);
                const double t0 = tisserand(c, sys, sc.gm_helio());
                const auto res = propagate_indicators(pack(k), w0, sys, icfg, sc.step_ks,
                                                      f_target, max_steps);
                const CartesianState cf = push_down(unpack_ks(res.state, res.s_final), sys);
                // Evaluate everything before touching the rasters so a failed
                // cell carries sentinels in all of them.
                const double tf = tisserand(cf, sys, sc.gm_helio());
                out.mfli.at(ix, iy) = res.mfli;
                out.rfli.at(ix, iy) = res.rfli;
                out.tisserand_initial.at(ix, iy) = t0;
                out.tisserand_final.at(ix, iy) = tf;
            } catch (const std::exception&) {
                failures.fetch_add(1); // NaN sentinels already in place
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    out.failures = failures.load();
    return out;
}

/// Count the mFLI jumps associated with a set of transits: the increment of
/// the accumulated integral across each transit (with a proper-time margin
/// covering the chi-window tail) compared against the threshold.
inline std::size_t count_mfli_jumps(const std::vector<IndicatorSample>& series,
                                    const std::vector<EncounterRecord>& transits,
                                    double threshold) {
    std::size_t jumps = 0;
    for (std::size_t t = 0; t < transits.size(); ++t) {
        const auto& rec = transits[t];
        double pad_before = 2.0, pad_after = 2.0;
        if (t > 0) pad_before = std::min(pad_before, 0.5 * (rec.s_entry - transits[t - 1].s_exit));
        if (t + 1 < transits.size())
            pad_after = std::min(pad_after, 0.5 * (transits[t + 1].s_entry - rec.s_exit));
        double before = 0.0, after = 0.0;
        bool have_before = false;
        for (const auto& smp : series) {
            if (smp.s <= rec.s_entry - pad_before) {
                before = smp.mfli;
                have_before = true;
            }
            if (smp.s <= rec.s_exit + pad_after) after = std::max(after, smp.mfli);
        }
        if (!have_before) before = series.empty() ? 0.0 : series.front().mfli;
        if (after - before >= threshold) ++jumps;
    }
    return jumps;
}

} // namespace ks3bp

// Command-line front end: propagate | compare | encounter | scan | check.
//
// Exit codes: 0 success, 1 numerical failure / failed check,
//             2 bad usage or configuration, 3 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ks3bp/harness.hpp"

using namespace ks3bp;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CommonOpts {
    std::string config;
    std::string preset;
    std::string mode;
    double step = 0.0;
    std::string out = ".";
    int threads = 1;
    long seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config = true) {
    auto* c = cmd->add_option("--config", o.config, "scenario configuration file");
    if (need_config) c->required();
    cmd->add_option("--preset", o.preset, "system preset override (sun-jupiter | sun-earth)");
    cmd->add_option("--mode", o.mode, "propagation mode override (cartesian | ks | switching)");
    cmd->add_option("--step", o.step, "step-size override for the active mode");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker thread count");
    cmd->add_option("--seed", o.seed, "random seed recorded in output metadata");
}

Scenario make_scenario(const CommonOpts& o) {
    Config cfg = Config::from_file(o.config);
    if (!o.preset.empty()) {
        cfg.set("system.preset", o.preset);
    }
    if (!o.mode.empty()) cfg.set("propagation.mode", o.mode);
    Scenario sc = load_scenario(cfg);
    if (o.step > 0.0) {
        if (sc.mode == "cartesian") sc.step_cart = o.step;
        else sc.step_ks = o.step;
    }
    return sc;
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    std::filesystem::create_directories(o.out);
    return (std::filesystem::path(o.out) / name).string();
}

nlohmann::json run_metadata(const CommonOpts& o, const Scenario& sc) {
    return nlohmann::json{{"config", o.config}, {"mode", sc.mode},   {"mu", sc.sys.mu},
                          {"eps", sc.sys.eps},  {"seed", o.seed},    {"threads", o.threads},
                          {"step_ks", sc.step_ks}, {"step_cart", sc.step_cart}};
}

void write_ks_trajectory(const std::string& path, const std::vector<double>& s,
                         const std::vector<std::array<double, 10>>& traj, const Scenario& sc) {
    CsvWriter csv(path, {"s", "f", "x", "y", "z", "px", "py", "pz", "d2", "energy_residual"});
    for (std::size_t i = 0; i < s.size(); ++i) {
        const KSState k = unpack_ks(traj[i], s[i]);
        const CartesianState c = push_down(k, sc.sys);
        const double r2 = dot(k.u, k.u);
        csv.row({s[i], c.f, c.r[0], c.r[1], c.r[2], c.p[0], c.p[1], c.p[2], r2,
                 hamiltonian_regularized(k, sc.sys) / r2});
    }
}

int cmd_propagate(const CommonOpts& o) {
    const Scenario sc = make_scenario(o);
    if (sc.mode == "switching") {
        if (!sc.has_f_target) throw std::runtime_error("switching mode needs propagation.f_target");
        const SwitchingResult res = run_switching(sc, sc.f_target);
        CsvWriter csv(out_path(o, "final_state.csv"),
                      {"f", "x", "y", "z", "px", "py", "pz", "switches", "iterations",
                       "max_energy_jump"});
        const auto& c = res.final_state;
        csv.row({c.f, c.r[0], c.r[1], c.r[2], c.p[0], c.p[1], c.p[2],
                 static_cast<double>(res.switches), static_cast<double>(res.iterations),
                 res.max_energy_jump});
        std::printf("switching: f=%.17g switches=%zu iterations=%zu max_energy_jump=%.3e\n",
                    c.f, res.switches, res.iterations, res.max_energy_jump);
        return 0;
    }
    if (sc.mode == "cartesian") {
        if (!sc.has_f_target) throw std::runtime_error("cartesian mode needs propagation.f_target");
        auto cfield = [&sc](double f, const std::array<double, 7>& y) {
            return vector_field_cartesian(f, y, sc.sys);
        };
        TrajectoryRecorder<7> rec;
        const auto res = propagate_to(cfield, sc.initial.f, pack(sc.initial), sc.step_cart,
                                      sc.f_target, rec);
        CsvWriter csv(out_path(o, "trajectory.csv"),
                      {"f", "x", "y", "z", "px", "py", "pz", "d2", "energy_residual"});
        for (std::size_t i = 0; i < rec.t.size(); ++i) {
            const CartesianState c = unpack_cartesian(rec.y[i], rec.t[i]);
            csv.row({c.f, c.r[0], c.r[1], c.r[2], c.p[0], c.p[1], c.p[2], c.d2(sc.sys),
                     hamiltonian_extended(c, sc.sys)});
        }
        std::printf("cartesian: %zu iterations to f=%.17g\n", res.iterations, res.t);
        return 0;
    }
    // Regularized propagation, s-span / f-target / far-field protocol.
    const EncounterRunResult res = run_encounter(sc);
    write_ks_trajectory(out_path(o, "trajectory.csv"), res.s, res.traj, sc);
    std::printf("ks: %zu nodes, f in [%.17g, %.17g]\n", res.s.size(),
                res.traj.empty() ? 0.0 : res.traj.front()[4],
                res.traj.empty() ? 0.0 : res.traj.back()[4]);
    return 0;
}

int cmd_compare(const CommonOpts& o) {
    const Scenario sc = make_scenario(o);
    if (!sc.has_s_span) throw std::runtime_error("compare needs propagation.s_back / s_fwd");
    const std::vector<double> ks_steps{kPi * 1e-2, kPi * 1e-3};
    const std::vector<double> cart_steps{2 * kPi * 1e-3, 2 * kPi * 1e-4, 2 * kPi * 1e-5};
    const CompareReport rep = run_compare(sc, ks_steps, cart_steps);
    CsvWriter csv(out_path(o, "compare.csv"),
                  {"is_ks", "step", "iterations", "f_minus", "f_plus", "r_minus", "r_plus",
                   "drift_minus", "drift_plus"});
    for (const auto& r : rep.rows) {
        csv.row({r.mode == "ks" ? 1.0 : 0.0, r.step, static_cast<double>(r.iterations), r.f_minus,
                 r.f_plus, r.r_minus, r.r_plus, r.drift_minus, r.drift_plus});
        std::printf("%-9s step=%-12.6g iters=%-8zu |r-|=%.16g |r+|=%.16g drift=(%.2e, %.2e)\n",
                    r.mode.c_str(), r.step, r.iterations, r.r_minus, r.r_plus, r.drift_minus,
                    r.drift_plus);
    }
    return 0;
}

int cmd_encounter(const CommonOpts& o) {
    const Scenario sc = make_scenario(o);
    const EncounterRunResult res = run_encounter(sc);
    write_ks_trajectory(out_path(o, "trajectory.csv"), res.s, res.traj, sc);
    write_encounters_jsonl(out_path(o, "encounters.jsonl"), res.records);
    for (const auto& r : res.records) {
        std::printf("transit: f in [%.9g, %.9g] d2_min=%.6g gamma0=%.7f band=[%.7f, %.7f] %s%s\n",
                    r.f_entry, r.f_exit, r.d2_min, r.gamma_entry, r.gamma_min,
                    r.gamma_max, r.hyperbolic ? "hyperbolic" : "NOT-hyperbolic",
                    (r.open_start || r.open_end) ? " (open)" : "");
    }
    std::printf("%zu transit(s)\n", res.records.size());
    return 0;
}

int cmd_scan(const CommonOpts& o) {
    const Scenario sc = make_scenario(o);
    const ScanResult res = run_scan(sc, o.threads);
    const nlohmann::json meta = run_metadata(o, sc);
    for (const Raster* r :
         {&res.mfli, &res.rfli, &res.tisserand_initial, &res.tisserand_final}) {
        write_raster(*r, out_path(o, r->name), meta);
    }
    std::printf("scan: %ldx%ld cells, %zu failure(s)\n", sc.nx, sc.ny, res.failures);
    return res.failures == static_cast<std::size_t>(sc.nx) * sc.ny ? 1 : 0;
}

int cmd_check(const CommonOpts& o) {
    const Scenario sc = make_scenario(o);
    const SystemParams& sys = sc.sys;
    int failures = 0;
    auto verdict = [&failures](const char* what, bool ok, double value) {
        std::printf("%s %-46s %.3e\n", ok ? "PASS" : "FAIL", what, value);
        if (!ok) ++failures;
    };

    const double he = std::abs(hamiltonian_extended(sc.initial, sys));
    verdict("extended Hamiltonian vanishes on the datum", he < 1e-12, he);

    const KSState k0 = lift(sc.initial, sys);
    const double kh = std::abs(hamiltonian_regularized(k0, sys));
    verdict("regularized Hamiltonian vanishes on the lift", kh < 1e-12, kh);
    const double l0 = std::abs(ks_bilinear(k0.u, k0.U));
    verdict("bilinear invariant vanishes on the lift", l0 < 1e-12, l0);

    const CartesianState round = push_down(k0, sys);
    double rt = 0.0;
    for (int i = 0; i < 3; ++i)
        rt = std::max({rt, std::abs(round.r[i] - sc.initial.r[i]),
                       std::abs(round.p[i] - sc.initial.p[i])});
    verdict("lift / push_down round trip", rt < 1e-12, rt);

    const double jid = std::abs(jacobi_value(sc.initial, sys) -
                                hamiltonian_cartesian(sc.initial, sys));
    verdict("Jacobi integral matches the Hamiltonian", jid < 1e-12, jid);

    // Short two-sided regularized run: energy drift and l conservation.
    auto kfield = [&sys](double, const std::array<double, 10>& y) {
        return vector_field_ks(y, sys);
    };
    const auto fwd = propagate_to(kfield, 0.0, pack(k0), kPi * 1e-3, 0.5);
    const KSState kf = unpack_ks(fwd.y, fwd.t);
    const double drift = std::abs(hamiltonian_regularized(kf, sys) / dot(kf.u, kf.u));
    verdict("short-run regularized energy drift", drift < 1e-11, drift);
    const double lf = std::abs(ks_bilinear(kf.u, kf.U));
    verdict("short-run bilinear invariant", lf < 1e-11, lf);
    const auto back = propagate_to(kfield, fwd.t, fwd.y, kPi * 1e-3, 0.0);
    const KSState kb = unpack_ks(back.y, back.t);
    double rev = 0.0;
    for (int i = 0; i < 10; ++i) rev = std::max(rev, std::abs(back.y[i] - pack(k0)[i]));
    verdict("short-run reversibility", rev < 1e-9, rev);

    std::printf("%s (%d failure(s))\n", failures == 0 ? "CHECK PASSED" : "CHECK FAILED", failures);
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized close-encounter toolkit for the elliptic restricted three-body problem"};
    app.require_subcommand(1);

    CommonOpts o_prop, o_cmp, o_enc, o_scan, o_chk;
    add_common(app.add_subcommand("propagate", "integrate one scenario and write the trajectory"),
               o_prop);
    add_common(app.add_subcommand("compare", "benchmark regularized vs Cartesian integration"),
               o_cmp);
    add_common(app.add_subcommand("encounter", "detect and classify Hill-sphere transits"), o_enc);
    add_common(app.add_subcommand("scan", "chaos-indicator raster over a grid"), o_scan);
    add_common(app.add_subcommand("check", "validate scenario invariants"), o_chk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("propagate")) return cmd_propagate(o_prop);
        if (app.got_subcommand("compare")) return cmd_compare(o_cmp);
        if (app.got_subcommand("encounter")) return cmd_encounter(o_enc);
        if (app.got_subcommand("scan")) return cmd_scan(o_scan);
        if (app.got_subcommand("check")) return cmd_check(o_chk);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("config") != std::string::npos || msg.find("scenario") != std::string::npos ||
            msg.find("needs") != std::string::npos)
            return 2;
        if (msg.find("cannot open") != std::string::npos) return 3;
        return 1;
    }
    return 2;
}

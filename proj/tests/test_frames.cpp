#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ks3bp/dynamics.hpp"
#include "ks3bp/frames.hpp"

using namespace ks3bp;

namespace {
std::mt19937 rng(7u);
constexpr double kPi = 3.14159265358979323846;
} // namespace

TEST_CASE("primaries distance at the apses", "[frames]") {
    SystemParams sys = SystemParams::sun_jupiter();
    REQUIRE(primaries_distance(0.0, sys) == Catch::Approx(1.0 - sys.eps).epsilon(1e-15));
    REQUIRE(primaries_distance(kPi, sys) == Catch::Approx(1.0 + sys.eps).epsilon(1e-15));
    sys.eps = 0.0;
    for (double f : {0.0, 1.0, -4.0}) REQUIRE(primaries_distance(f, sys) == 1.0);
}

TEST_CASE("z-rotation is orthogonal and periodic", "[frames]") {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 v{d(rng), d(rng), d(rng)};
        const double f = 3.0 * d(rng);
        const Vec3 w = rotate_z(f, v);
        REQUIRE(norm(w) == Catch::Approx(norm(v)).epsilon(1e-14));
        const Vec3 back = rotate_z(-f, w);
        for (int i = 0; i < 3; ++i) REQUIRE(back[i] == Catch::Approx(v[i]).margin(1e-14));
        const Vec3 per = rotate_z(f + 2.0 * kPi, v);
        for (int i = 0; i < 3; ++i) REQUIRE(per[i] == Catch::Approx(w[i]).margin(1e-13));
    }
}

TEST_CASE("primaries stay mutual and their barycenter at the origin", "[frames]") {
    const SystemParams sys = SystemParams::sun_jupiter();
    for (double f : {0.0, 0.7, 2.0, 4.5, -1.3}) {
        const InertialState p1 = primary_inertial(f, sys);
        const InertialState p2 = secondary_inertial(f, sys);
        const Vec3 bary = (1.0 - sys.mu) * p1.R + sys.mu * p2.R;
        for (int i = 0; i < 3; ++i) REQUIRE(bary[i] == Catch::Approx(0.0).margin(1e-15));
        REQUIRE(norm(p2.R - p1.R) == Catch::Approx(primaries_distance(f, sys)).epsilon(1e-14));
    }
}

TEST_CASE("the secondary sits at the rotating-frame point (1-mu, 0, 0)", "[frames]") {
    const SystemParams sys = SystemParams::sun_jupiter();
    for (double f : {0.0, 0.9, 2.8, -2.2}) {
        const CartesianState c = inertial_to_rotating(secondary_inertial(f, sys), f, sys);
        REQUIRE(c.r[0] == Catch::Approx(1.0 - sys.mu).epsilon(1e-13));
        REQUIRE(c.r[1] == Catch::Approx(0.0).margin(1e-13));
        REQUIRE(c.r[2] == 0.0);
        // The secondary is at synodic rest: momenta of a comoving point.
        REQUIRE(c.p[0] == Catch::Approx(-c.r[1]).margin(1e-13));
        REQUIRE(c.p[1] == Catch::Approx(c.r[0]).margin(1e-13));
    }
}

TEST_CASE("rotating <-> inertial round trip", "[frames]") {
    const SystemParams sys = SystemParams::sun_earth();
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        CartesianState c;
        c.r = {d(rng), d(rng), d(rng)};
        c.p = {d(rng), d(rng), d(rng)};
        c.f = 4.0 * d(rng);
        c.Phi = 0.0;
        const InertialState st = rotating_to_inertial(c, sys);
        const CartesianState back = inertial_to_rotating(st, c.f, sys);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(back.r[i] == Catch::Approx(c.r[i]).margin(1e-12));
            REQUIRE(back.p[i] == Catch::Approx(c.p[i]).margin(1e-12));
        }
    }
}

TEST_CASE("Kepler solver: exact cases and residual bound", "[frames]") {
    REQUIRE(solve_kepler(0.0, 0.5) == 0.0);
    REQUIRE(solve_kepler(kPi, 0.9) == Catch::Approx(kPi).margin(1e-13));
    std::uniform_real_distribution<double> dm(-3.0, 3.0), de(0.0, 0.97);
    for (int trial = 0; trial < 500; ++trial) {
        const double M = dm(rng), e = de(rng);
        const double E = solve_kepler(M, e);
        REQUIRE(std::abs(E - e * std::sin(E) - M) <= 1e-13);
    }
}

TEST_CASE("anomaly conversions are mutually inverse", "[frames]") {
    std::uniform_real_distribution<double> dm(-3.0, 3.0), de(0.0, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
        const double nu = dm(rng), e = de(rng);
        REQUIRE(mean_to_true(true_to_mean(nu, e), e) == Catch::Approx(nu).margin(1e-12));
    }
}

TEST_CASE("elements -> state at pericenter of a planar orbit", "[frames]") {
    const double gm = 1.0;
    OrbitalElements el{2.0, 0.5, 0.0, 0.0, 0.0, 0.0};
    const InertialState st = elements_to_cartesian(el, gm);
    REQUIRE(st.R[0] == Catch::Approx(el.a * (1.0 - el.e)).epsilon(1e-15));
    REQUIRE(st.R[1] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(st.V[0] == Catch::Approx(0.0).margin(1e-15));
    // vis-viva at pericenter
    const double v = std::sqrt(gm * (2.0 / (el.a * (1.0 - el.e)) - 1.0 / el.a));
    REQUIRE(st.V[1] == Catch::Approx(v).epsilon(1e-14));
}

TEST_CASE("elements round trip through cartesian", "[frames]") {
    std::uniform_real_distribution<double> da(0.5, 3.0), de(0.01, 0.8), di(0.05, 2.9),
        dang(-3.0, 3.0);
    const double gm = 0.9990463566269199;
    for (int trial = 0; trial < 200; ++trial) {
        OrbitalElements el{da(rng), de(rng), di(rng), dang(rng), dang(rng), dang(rng)};
        const InertialState st = elements_to_cartesian(el, gm);
        const OrbitalElements back = cartesian_to_elements(st, gm);
        REQUIRE(back.a == Catch::Approx(el.a).epsilon(1e-11));
        REQUIRE(back.e == Catch::Approx(el.e).margin(1e-11));
        REQUIRE(back.i == Catch::Approx(el.i).margin(1e-11));
        // Angles match modulo 2 pi.
        auto wrap = [](double x) { return std::remainder(x, 2.0 * kPi); };
        REQUIRE(wrap(back.omega - el.omega) == Catch::Approx(0.0).margin(1e-10));
        REQUIRE(wrap(back.Omega_node - el.Omega_node) == Catch::Approx(0.0).margin(1e-10));
        REQUIRE(wrap(back.f_true - el.f_true) == Catch::Approx(0.0).margin(1e-10));
    }
}

TEST_CASE("vis-viva and angular momentum of the conversion", "[frames]") {
    std::mt19937 r2(99u);
    std::uniform_real_distribution<double> da(0.5, 3.0), de(0.0, 0.9), dang(-3.0, 3.0);
    const double gm = 1.7;
    for (int trial = 0; trial < 100; ++trial) {
        OrbitalElements el{da(r2), de(r2), 0.3, dang(r2), 0.0, dang(r2)};
        const InertialState st = elements_to_cartesian(el, gm);
        const double r = norm(st.R);
        const double v2 = dot(st.V, st.V);
        REQUIRE(v2 == Catch::Approx(gm * (2.0 / r - 1.0 / el.a)).epsilon(1e-12));
        const Vec3 h{st.R[1] * st.V[2] - st.R[2] * st.V[1],
                     st.R[2] * st.V[0] - st.R[0] * st.V[2],
                     st.R[0] * st.V[1] - st.R[1] * st.V[0]};
        REQUIRE(norm(h) == Catch::Approx(std::sqrt(gm * el.a * (1.0 - el.e * el.e))).epsilon(1e-12));
    }
}

TEST_CASE("heliocentric seed of the resonant scan orbit", "[frames]") {
    // 2:3 interior resonance with the secondary: a = (3/2)^(2/3).
    const SystemParams sys = SystemParams::sun_earth();
    OrbitalElements el{1.3103706971044482, 0.6, 0.0, 0.0, 0.0, 0.22823102675215523};
    REQUIRE(el.a == Catch::Approx(std::pow(1.5, 2.0 / 3.0)).epsilon(1e-14));

    const double f0 = 0.9862623425908257;
    const InertialState helio = elements_to_cartesian(el, 1.0 - sys.mu);
    const InertialState sun = primary_inertial(f0, sys);
    const InertialState bary{helio.R + sun.R, helio.V + sun.V};
    CartesianState c = inertial_to_rotating(bary, f0, sys);
    c.Phi = -hamiltonian_cartesian(c, sys);
    // The seed lies outside the Hill sphere and is admissible by construction.
    REQUIRE(c.d2(sys) > sys.hill_radius_q());
    REQUIRE(hamiltonian_extended(c, sys) == Catch::Approx(0.0).margin(1e-15));
    const double gamma0 = gamma_coefficient(c.f, c.Phi, sys);
    REQUIRE(std::isfinite(gamma0));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ks3bp/ks_map.hpp"

using namespace ks3bp;

namespace {
std::mt19937 rng(20260826u);
Vec4 random_vec4(double scale = 1.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng), d(rng), d(rng)};
}
} // namespace

TEST_CASE("KS matrix is a scaled orthogonal matrix", "[ks_map]") {
    for (int trial = 0; trial < 50; ++trial) {
        const Vec4 u = random_vec4();
        const Mat4 A = ks_matrix(u);
        const double r2 = dot(u, u);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double aat = 0.0;
                for (int k = 0; k < 4; ++k) aat += A[i][k] * A[j][k];
                const double expect = (i == j) ? r2 : 0.0;
                REQUIRE(aat == Catch::Approx(expect).margin(1e-13));
            }
    }
}

TEST_CASE("projection on the first basis vector", "[ks_map]") {
    const Vec3 q = ks_project(Vec4{1.0, 0.0, 0.0, 0.0});
    REQUIRE(q[0] == 1.0);
    REQUIRE(q[1] == 0.0);
    REQUIRE(q[2] == 0.0);
}

TEST_CASE("projection norm identity |pi(u)| = |u|^2", "[ks_map]") {
    for (int trial = 0; trial < 200; ++trial) {
        const Vec4 u = random_vec4(2.0);
        const Vec3 q = ks_project(u);
        REQUIRE(norm(q) == Catch::Approx(dot(u, u)).margin(1e-12));
    }
}

TEST_CASE("projection is invariant along the fiber rotation", "[ks_map]") {
    // S_theta: (u1,u4) and (u2,u3)... the fiber circle action keeps pi fixed:
    // u -> (u1 cos - u4 sin, u2 cos + u3 sin, u3 cos - u2 sin, u4 cos + u1 sin)
    std::uniform_real_distribution<double> ang(-3.14, 3.14);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec4 u = random_vec4();
        const double th = ang(rng);
        const double c = std::cos(th), s = std::sin(th);
        const Vec4 ur{c * u[0] - s * u[3], c * u[1] + s * u[2], c * u[2] - s * u[1],
                      c * u[3] + s * u[0]};
        const Vec3 q0 = ks_project(u);
        const Vec3 q1 = ks_project(ur);
        for (int i = 0; i < 3; ++i) REQUIRE(q1[i] == Catch::Approx(q0[i]).margin(1e-12));
    }
}

TEST_CASE("gauge vector: homogeneity, l-orthogonality and norm bound", "[ks_map]") {
    std::uniform_real_distribution<double> sc(0.1, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec4 u = random_vec4(1.5);
        const Vec4 b = ks_gauge(u);
        // degree-3 homogeneity
        const double lam = sc(rng);
        const Vec4 bs = ks_gauge(lam * u);
        for (int i = 0; i < 4; ++i)
            REQUIRE(bs[i] == Catch::Approx(lam * lam * lam * b[i]).margin(1e-12));
        // l(u, b(u)) = 0
        REQUIRE(ks_bilinear(u, b) == Catch::Approx(0.0).margin(1e-12));
        // |b| <= 2 |u|^3
        const double un = norm(u);
        REQUIRE(norm(b) <= 2.0 * un * un * un + 1e-12);
    }
}

TEST_CASE("gauge vector at a simple point", "[ks_map]") {
    // u = e1: pi = (1,0,0), a2 = (0,1,0,0), so b = 2 a2.
    const Vec4 b = ks_gauge(Vec4{1.0, 0.0, 0.0, 0.0});
    REQUIRE(b[0] == 0.0);
    REQUIRE(b[1] == 2.0);
    REQUIRE(b[2] == 0.0);
    REQUIRE(b[3] == 0.0);
}

TEST_CASE("bilinear invariant is antisymmetric under the fiber pairing", "[ks_map]") {
    for (int trial = 0; trial < 100; ++trial) {
        const Vec4 u = random_vec4(), U = random_vec4();
        REQUIRE(ks_bilinear(u, U) == Catch::Approx(-ks_bilinear(U, u)).margin(1e-13));
        REQUIRE(ks_bilinear(u, u) == Catch::Approx(0.0).margin(1e-13));
    }
}

TEST_CASE("lift reproduces the canonical close-encounter datum", "[ks_map]") {
    const SystemParams sys = SystemParams::sun_jupiter();
    CartesianState c;
    c.r = {1.0 - sys.mu + 1.921451079855507e-3, 0.0, 0.0};
    c.p = {0.2, 1.8, 0.6};
    c.f = 0.0;
    c.Phi = 1.38220656687993415599; // admissible action -H

    const KSState k = lift(c, sys);
    const double u1 = std::sqrt(1.921451079855507e-3);
    REQUIRE(k.u[0] == Catch::Approx(u1).epsilon(1e-14));
    REQUIRE(k.u[1] == 0.0);
    REQUIRE(k.u[2] == 0.0);
    REQUIRE(k.u[3] == 0.0);
    REQUIRE(k.U[0] == Catch::Approx(2.0 * 0.2 * u1).epsilon(1e-13));
    REQUIRE(k.U[1] == Catch::Approx(2.0 * (1.8 - 1.0 + sys.mu) * u1).epsilon(1e-13));
    REQUIRE(k.U[2] == Catch::Approx(2.0 * 0.6 * u1).epsilon(1e-13));
    REQUIRE(k.U[3] == 0.0);
    REQUIRE(ks_bilinear(k.u, k.U) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("push_down inverts lift", "[ks_map]") {
    const SystemParams sys = SystemParams::sun_jupiter();
    std::uniform_real_distribution<double> d(-0.8, 0.8);
    for (int trial = 0; trial < 300; ++trial) {
        CartesianState c;
        c.r = {1.0 - sys.mu + d(rng), d(rng), d(rng)};
        c.p = {d(rng), d(rng), d(rng)};
        c.f = d(rng);
        c.Phi = d(rng);
        const Vec3 q = ks_local_position(c, sys);
        if (norm(q) < 1e-6) continue;
        const CartesianState back = push_down(lift(c, sys), sys);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(back.r[i] == Catch::Approx(c.r[i]).margin(1e-13));
            REQUIRE(back.p[i] == Catch::Approx(c.p[i]).margin(1e-12));
        }
        REQUIRE(back.f == c.f);
        REQUIRE(back.Phi == c.Phi);
    }
}

TEST_CASE("both branch sections agree on the q1 = 0 plane", "[ks_map]") {
    const SystemParams sys = SystemParams::sun_jupiter();
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        // States straddling the branch boundary: tiny +-q1 perturbations must
        // push down to almost identical Cartesian data.
        const double q2 = d(rng), q3 = d(rng);
        if (q2 * q2 + q3 * q3 < 1e-8) continue;
        CartesianState cp, cm;
        cp.r = {1.0 - sys.mu + 1e-14, q2, q3};
        cm.r = {1.0 - sys.mu - 1e-14, q2, q3};
        cp.p = cm.p = {d(rng), d(rng), d(rng)};
        cp.f = cm.f = 0.3;
        cp.Phi = cm.Phi = 0.0;
        const CartesianState bp = push_down(lift(cp, sys), sys);
        const CartesianState bm = push_down(lift(cm, sys), sys);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(bp.r[i] == Catch::Approx(bm.r[i]).margin(1e-10));
            REQUIRE(bp.p[i] == Catch::Approx(bm.p[i]).margin(1e-9));
        }
    }
}

TEST_CASE("lift of the collision point is rejected", "[ks_map]") {
    const SystemParams sys{0.25, 0.1}; // mu with exact binary representation
    CartesianState c;
    c.r = {1.0 - sys.mu, 0.0, 0.0};
    c.p = {0.0, 0.0, 0.0};
    c.f = 0.0;
    c.Phi = 0.0;
    REQUIRE_THROWS_AS(lift(c, sys), std::invalid_argument);
}

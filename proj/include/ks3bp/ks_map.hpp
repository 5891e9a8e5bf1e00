#pragma once

#include <cmath>
#include <stdexcept>

#include "ks3bp/system.hpp"

namespace ks3bp {

/// The three generator rows of the KS matrix A(u).  With a1,a2,a3 below,
/// A(u) has rows a1, a2, a3 and the extra row (u4,-u3,u2,-u1), and satisfies
/// A A^T = |u|^2 I.
inline Vec4 ks_a1(const Vec4& u) { return {u[0], -u[1], -u[2], u[3]}; }
inline Vec4 ks_a2(const Vec4& u) { return {u[1], u[0], -u[3], -u[2]}; }
inline Vec4 ks_a3(const Vec4& u) { return {u[2], u[3], u[0], u[1]}; }

/// Full KS matrix A(u) (4x4).
inline Mat4 ks_matrix(const Vec4& u) {
    return {{{u[0], -u[1], -u[2], u[3]},
             {u[1], u[0], -u[3], -u[2]},
             {u[2], u[3], u[0], u[1]},
             {u[3], -u[2], u[1], -u[0]}}};
}

/// Hopf-type projection pi(u): the first three components of A(u)u.
/// |pi(u)| = |u|^2.
inline Vec3 ks_project(const Vec4& u) {
    return {dot(ks_a1(u), u), dot(ks_a2(u), u), dot(ks_a3(u), u)};
}

/// Bilinear invariant l(u,U); l = 0 is preserved by the regularized flow.
inline double ks_bilinear(const Vec4& u, const Vec4& U) {
    return u[3] * U[0] - u[2] * U[1] + u[1] * U[2] - u[0] * U[3];
}

/// Cubic gauge vector b(u) = 2 A^T Lambda A u = 2 (pi1(u) a2 - pi2(u) a1).
/// It is degree-3 homogeneous, orthogonal in the l-pairing (l(u,b)=0) and
/// bounded by |b| <= 2 |u|^3.
inline Vec4 ks_gauge(const Vec4& u) {
    const Vec4 a1 = ks_a1(u), a2 = ks_a2(u);
    const double p1 = dot(a1, u), p2 = dot(a2, u);
    return 2.0 * (p1 * a2) - 2.0 * (p2 * a1);
}

/// Local KS coordinates of a Cartesian state relative to the second primary:
/// q = r - (1-mu, 0, 0), pbar = p - (0, 1-mu, 0).
inline Vec3 ks_local_position(const CartesianState& c, const SystemParams& sys) {
    return {c.r[0] - 1.0 + sys.mu, c.r[1], c.r[2]};
}

/// Lift a Cartesian state to the KS chart.  The fiber point is fixed by the
/// branch rule: the u4=0 section for q1 >= 0, the u3=0 section otherwise,
/// which keeps the square roots away from their excluded half-axes.
/// Phi is copied through; admissible data carry Phi = -H so that the
/// regularized Hamiltonian vanishes on the lift.
inline KSState lift(const CartesianState& c, const SystemParams& sys) {
    const Vec3 q = ks_local_position(c, sys);
    const double d = norm(q);
    if (!(d > 0.0)) throw std::invalid_argument("lift: collision with the second primary");

    Vec4 u;
    if (q[0] >= 0.0) {
        const double t = std::sqrt(0.5 * (d + q[0]));
        u = {t, q[1] / (2.0 * t), q[2] / (2.0 * t), 0.0};
    } else {
        const double t = std::sqrt(0.5 * (d - q[0]));
        u = {q[1] / (2.0 * t), t, 0.0, q[2] / (2.0 * t)};
    }

    const Vec4 pbar{c.p[0], c.p[1] - 1.0 + sys.mu, c.p[2], 0.0};
    const Mat4 A = ks_matrix(u);
    Vec4 U;
    for (int j = 0; j < 4; ++j) {
        U[j] = 2.0 * (A[0][j] * pbar[0] + A[1][j] * pbar[1] + A[2][j] * pbar[2]);
    }
    return {u, c.f, U, c.Phi, 0.0};
}

/// Project a KS state back to the Cartesian chart.  Exact inverse of lift on
/// the constraint surface l(u,U) = 0.
inline CartesianState push_down(const KSState& k, const SystemParams& sys) {
    const double r2 = dot(k.u, k.u);
    if (!(r2 > 0.0)) throw std::invalid_argument("push_down: u = 0 is the collision set");
    const Vec3 q = ks_project(k.u);
    const Mat4 A = ks_matrix(k.u);
    Vec4 AU;
    for (int i = 0; i < 4; ++i) AU[i] = dot(Vec4{A[i][0], A[i][1], A[i][2], A[i][3]}, k.U);

    CartesianState c;
    c.r = {q[0] + 1.0 - sys.mu, q[1], q[2]};
    c.p = {AU[0] / (2.0 * r2), AU[1] / (2.0 * r2) + 1.0 - sys.mu, AU[2] / (2.0 * r2)};
    c.f = k.phi;
    c.Phi = k.Phi;
    return c;
}

} // namespace ks3bp

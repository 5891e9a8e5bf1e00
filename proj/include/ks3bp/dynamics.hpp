#pragma once

#include <cmath>

#include "ks3bp/ks_map.hpp"
#include "ks3bp/system.hpp"

namespace ks3bp {

using Mat8 = std::array<std::array<double, 8>, 8>;

/// Hamiltonian of the rotating-pulsating frame with the true anomaly as
/// independent variable.
inline double hamiltonian_cartesian(const CartesianState& c, const SystemParams& sys) {
    const double d1 = c.d1(sys), d2 = c.d2(sys);
    const double h = sys.eps * std::cos(c.f);
    const double cc = 1.0 / (1.0 + h);
    const double r2 = dot(c.r, c.r);
    return 0.5 * dot(c.p, c.p) + c.p[0] * c.r[1] - c.r[0] * c.p[1] -
           cc * ((1.0 - sys.mu) / d1 + sys.mu / d2 - 0.5 * r2 * h);
}

/// Extended Hamiltonian H + Phi; zero on admissible data and conserved by
/// the extended flow.
inline double hamiltonian_extended(const CartesianState& c, const SystemParams& sys) {
    return hamiltonian_cartesian(c, sys) + c.Phi;
}

/// Vector field of the extended Cartesian system, derivative with respect
/// to the true anomaly f.  State layout: (x, y, z, p1, p2, p3, Phi).
inline std::array<double, 7> vector_field_cartesian(double f, const std::array<double, 7>& y,
                                                    const SystemParams& sys) {
    const double x = y[0], yy = y[1], z = y[2];
    const double p1 = y[3], p2 = y[4], p3 = y[5];
    const double mu = sys.mu;
    const double h = sys.eps * std::cos(f);
    const double cc = 1.0 / (1.0 + h);

    const Vec3 rel1{x + mu, yy, z};
    const Vec3 rel2{x - 1.0 + mu, yy, z};
    const double d1 = norm(rel1), d2 = norm(rel2);
    const double k1 = (1.0 - mu) / (d1 * d1 * d1);
    const double k2 = mu / (d2 * d2 * d2);

    std::array<double, 7> dy;
    dy[0] = p1 + yy;
    dy[1] = p2 - x;
    dy[2] = p3;
    dy[3] = p2 - cc * (k1 * rel1[0] + k2 * rel2[0] + h * x);
    dy[4] = -p1 - cc * (k1 * rel1[1] + k2 * rel2[1] + h * yy);
    dy[5] = -cc * (k1 * rel1[2] + k2 * rel2[2] + h * z);
    const double r2 = x * x + yy * yy + z * z;
    dy[6] = sys.eps * std::sin(f) * cc * cc * ((1.0 - mu) / d1 + mu / d2 + 0.5 * r2);
    return dy;
}

/// Drift coefficient Gamma(phi, Phi) = -Phi + (3 - 4 mu + mu^2)/(2 (1 + eps cos phi)).
/// For eps = 0 it is the constant of the circular problem.
inline double gamma_coefficient(double phi, double Phi, const SystemParams& sys) {
    const double mu = sys.mu;
    return -Phi + (3.0 - 4.0 * mu + mu * mu) / (2.0 * (1.0 + sys.eps * std::cos(phi)));
}

namespace detail {

/// Shared geometric quantities of a KS state used by the Hamiltonian, the
/// vector field and the variational matrix.
struct KSGeometry {
    Vec4 u, U;
    double phi, Phi;
    Vec4 a1, a2, a3;
    Vec3 pi;      // projected local position
    double r2;    // |u|^2 = Cartesian distance to the second primary
    Vec3 w3;      // pi + (1,0,0), local position of the first primary image
    double d1;    // |w3|, Cartesian distance to the first primary
    double h;     // eps cos phi
    double cc;    // 1/(1 + eps cos phi)
    double sphi;  // eps sin phi
    Vec4 b;       // gauge vector
    Vec4 v;       // U - b
    double P;     // pi1^2 + pi2^2 - h pi3^2
    double G;     // grouped potential-like term of the regularized Hamiltonian
    Vec4 g;       // w3_1 a1 + w3_2 a2 + w3_3 a3 (so grad(1/d1) = -2 g / d1^3)
    Vec4 gradG;
    double mu;

    KSGeometry(const std::array<double, 10>& y, const SystemParams& sys) {
        u = {y[0], y[1], y[2], y[3]};
        phi = y[4];
        U = {y[5], y[6], y[7], y[8]};
        Phi = y[9];
        mu = sys.mu;

        a1 = ks_a1(u);
        a2 = ks_a2(u);
        a3 = ks_a3(u);
        pi = {dot(a1, u), dot(a2, u), dot(a3, u)};
        r2 = dot(u, u);
        w3 = {pi[0] + 1.0, pi[1], pi[2]};
        d1 = norm(w3);
        h = sys.eps * std::cos(phi);
        cc = 1.0 / (1.0 + h);
        sphi = sys.eps * std::sin(phi);
        b = 2.0 * (pi[0] * a2) - 2.0 * (pi[1] * a1);
        v = U - b;
        P = pi[0] * pi[0] + pi[1] * pi[1] - h * pi[2] * pi[2];

        const double om = 1.0 - mu;
        G = om * r2 * (1.0 / d1 + pi[0]) + mu + 0.5 * r2 * P + 0.5 * om * om * r2;

        g = w3[0] * a1 + w3[1] * a2 + w3[2] * a3;
        const double id13 = 1.0 / (d1 * d1 * d1);
        gradG = om * (2.0 * (1.0 / d1 + pi[0]) * u + r2 * ((-2.0 * id13) * g + 2.0 * a1)) +
                P * u + 2.0 * r2 * (pi[0] * a1 + pi[1] * a2 - h * (pi[2] * a3)) + (om * om) * u;
    }
};

/// Constant sparse symmetric matrices D_h = Hess(pi_h)/2; pi_h(u) = u^T D_h u.
inline Mat4 ks_d1_matrix() {
    return {{{1, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}}};
}
inline Mat4 ks_d2_matrix() {
    return {{{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, -1, 0}}};
}
inline Mat4 ks_d3_matrix() {
    return {{{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}}};
}

inline Vec4 mat_vec(const Mat4& M, const Vec4& x) {
    Vec4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += M[i][j] * x[j];
    return r;
}

inline void add_outer(Mat4& M, double s, const Vec4& a, const Vec4& b) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M[i][j] += s * a[i] * b[j];
}

inline void add_scaled(Mat4& M, double s, const Mat4& A) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M[i][j] += s * A[i][j];
}

/// Jacobian B = Db of the gauge vector.
inline Mat4 gauge_jacobian(const KSGeometry& geo) {
    Mat4 B{};
    add_outer(B, 4.0, geo.a2, geo.a1);
    add_outer(B, -4.0, geo.a1, geo.a2);
    add_scaled(B, 2.0 * geo.pi[0], ks_d2_matrix());
    add_scaled(B, -2.0 * geo.pi[1], ks_d1_matrix());
    return B;
}

/// Contraction M(v)_{jk} = sum_i v_i d^2 b_i / du_j du_k.
inline Mat4 gauge_hessian_contraction(const KSGeometry& geo, const Vec4& v) {
    const Mat4 D1 = ks_d1_matrix(), D2 = ks_d2_matrix();
    const Vec4 D1v = mat_vec(D1, v), D2v = mat_vec(D2, v);
    Mat4 M{};
    add_scaled(M, 4.0 * dot(v, geo.a2), D1);
    add_scaled(M, -4.0 * dot(v, geo.a1), D2);
    add_outer(M, 4.0, geo.a1, D2v);
    add_outer(M, 4.0, D2v, geo.a1);
    add_outer(M, -4.0, geo.a2, D1v);
    add_outer(M, -4.0, D1v, geo.a2);
    return M;
}

/// Hessian of G with respect to u.
inline Mat4 potential_hessian(const KSGeometry& geo) {
    const double om = 1.0 - geo.mu;
    const Mat4 D1 = ks_d1_matrix(), D2 = ks_d2_matrix(), D3 = ks_d3_matrix();
    const double id13 = 1.0 / (geo.d1 * geo.d1 * geo.d1);
    const double id15 = id13 / (geo.d1 * geo.d1);

    // H(1/d1 + pi1)
    Mat4 H1{};
    add_outer(H1, 12.0 * id15, geo.g, geo.g);
    add_outer(H1, -4.0 * id13, geo.a1, geo.a1);
    add_outer(H1, -4.0 * id13, geo.a2, geo.a2);
    add_outer(H1, -4.0 * id13, geo.a3, geo.a3);
    add_scaled(H1, -2.0 * id13 * geo.w3[0], D1);
    add_scaled(H1, -2.0 * id13 * geo.w3[1], D2);
    add_scaled(H1, -2.0 * id13 * geo.w3[2], D3);
    add_scaled(H1, 2.0, D1);

    // H( (1-mu) r2 (1/d1 + pi1) )
    Mat4 HG{};
    const Vec4 n = (-2.0 * id13) * geo.g + 2.0 * geo.a1; // grad(1/d1 + pi1)
    for (int i = 0; i < 4; ++i) HG[i][i] += 2.0 * om * (1.0 / geo.d1 + geo.pi[0]);
    add_outer(HG, 2.0 * om, geo.u, n);
    add_outer(HG, 2.0 * om, n, geo.u);
    add_scaled(HG, om * geo.r2, H1);

    // H( r2 P / 2 )
    const Vec4 gradP = 4.0 * (geo.pi[0] * geo.a1) + 4.0 * (geo.pi[1] * geo.a2) -
                       4.0 * geo.h * (geo.pi[2] * geo.a3);
    for (int i = 0; i < 4; ++i) HG[i][i] += geo.P;
    add_outer(HG, 1.0, geo.u, gradP);
    add_outer(HG, 1.0, gradP, geo.u);
    Mat4 HP{};
    add_outer(HP, 8.0, geo.a1, geo.a1);
    add_outer(HP, 8.0, geo.a2, geo.a2);
    add_outer(HP, -8.0 * geo.h, geo.a3, geo.a3);
    add_scaled(HP, 4.0 * geo.pi[0], D1);
    add_scaled(HP, 4.0 * geo.pi[1], D2);
    add_scaled(HP, -4.0 * geo.h * geo.pi[2], D3);
    add_scaled(HG, 0.5 * geo.r2, HP);

    // H( (1-mu)^2 r2 / 2 )
    for (int i = 0; i < 4; ++i) HG[i][i] += om * om;
    return HG;
}

} // namespace detail

/// Regularized Hamiltonian K(u, phi, U, Phi); zero on admissible data.
inline double hamiltonian_regularized(const KSState& k, const SystemParams& sys) {
    const detail::KSGeometry geo(pack(k), sys);
    return 0.125 * dot(geo.v, geo.v) - geo.cc * geo.G + k.Phi * geo.r2;
}

/// Same Hamiltonian through the split into the quadratic normal-form part
/// -Gamma |u|^2 plus the analytic remainder; used as an algebraic cross-check.
inline double hamiltonian_regularized_split(const KSState& k, const SystemParams& sys) {
    const detail::KSGeometry geo(pack(k), sys);
    const double om = 1.0 - sys.mu;
    const double remainder =
        -geo.cc * (om * geo.r2 * (1.0 / geo.d1 + geo.pi[0] - 1.0) + 0.5 * geo.r2 * geo.P);
    return 0.125 * dot(geo.v, geo.v) - geo.r2 * gamma_coefficient(k.phi, k.Phi, sys) -
           sys.mu * geo.cc + remainder;
}

/// Vector field of the regularized system, derivative with respect to the
/// proper time s.  State layout: (u1..u4, phi, U1..U4, Phi).  Autonomous.
inline std::array<double, 10> vector_field_ks(const std::array<double, 10>& y, const SystemParams& sys) {
    const detail::KSGeometry geo(y, sys);
    const Mat4 B = detail::gauge_jacobian(geo);

    std::array<double, 10> dy;
    for (int i = 0; i < 4; ++i) dy[i] = 0.25 * geo.v[i];
    dy[4] = geo.r2;
    // dU/ds = B^T v / 4 + c grad G - 2 Phi u
    for (int j = 0; j < 4; ++j) {
        double btv = 0.0;
        for (int i = 0; i < 4; ++i) btv += B[i][j] * geo.v[i];
        dy[5 + j] = 0.25 * btv + geo.cc * geo.gradG[j] - 2.0 * geo.Phi * geo.u[j];
    }
    dy[9] = geo.sphi * (geo.cc * geo.cc * geo.G + 0.5 * geo.cc * geo.r2 * geo.pi[2] * geo.pi[2]);
    return dy;
}

/// Variational (Jacobian) matrix of the (u, U) block of the regularized
/// field, evaluated along a state.  Ordering: (u1..u4, U1..U4).
inline Mat8 variational_matrix(const std::array<double, 10>& y, const SystemParams& sys) {
    const detail::KSGeometry geo(y, sys);
    const Mat4 B = detail::gauge_jacobian(geo);
    const Mat4 Mv = detail::gauge_hessian_contraction(geo, geo.v);
    const Mat4 HG = detail::potential_hessian(geo);

    // Huu K = B^T B / 4 - M(v)/4 - c HG + 2 Phi I
    Mat4 Huu{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double btb = 0.0;
            for (int k = 0; k < 4; ++k) btb += B[k][i] * B[k][j];
            Huu[i][j] = 0.25 * btb - 0.25 * Mv[i][j] - geo.cc * HG[i][j];
        }
    for (int i = 0; i < 4; ++i) Huu[i][i] += 2.0 * geo.Phi;

    Mat8 X{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            X[i][j] = -0.25 * B[i][j];      // d(du/ds)/du
            X[i][4 + j] = 0.0;              // d(du/ds)/dU
            X[4 + i][j] = -Huu[i][j];       // d(dU/ds)/du
            X[4 + i][4 + j] = 0.25 * B[j][i]; // d(dU/ds)/dU
        }
    for (int i = 0; i < 4; ++i) X[i][4 + i] = 0.25;
    return X;
}

/// Collision limit of the variational matrix at drift coefficient Gamma:
/// off-diagonal blocks I/4 and 2 Gamma I.
inline Mat8 variational_matrix_limit(double gamma_s) {
    Mat8 X{};
    for (int i = 0; i < 4; ++i) {
        X[i][4 + i] = 0.25;
        X[4 + i][i] = 2.0 * gamma_s;
    }
    return X;
}

/// Jacobi-type integral of the rotating-pulsating frame, written in synodic
/// velocities.  Coincides numerically with the Hamiltonian.
inline double jacobi_value(const CartesianState& c, const SystemParams& sys) {
    const double d1 = c.d1(sys), d2 = c.d2(sys);
    const double h = sys.eps * std::cos(c.f);
    const double cc = 1.0 / (1.0 + h);
    const Vec3 vel{c.p[0] + c.r[1], c.p[1] - c.r[0], c.p[2]};
    return 0.5 * dot(vel, vel) -
           cc * ((1.0 - sys.mu) / d1 + sys.mu / d2 +
                 0.5 * (c.r[0] * c.r[0] + c.r[1] * c.r[1] - c.r[2] * c.r[2] * h));
}

/// Jacobi value of the equilateral point L4 at rest in the rotating frame;
/// serves as an energy threshold when selecting scan scenarios.
inline double jacobi_l4(double f, const SystemParams& sys) {
    CartesianState c;
    c.r = {0.5 - sys.mu, std::sqrt(3.0) / 2.0, 0.0};
    c.p = {-c.r[1], c.r[0], 0.0}; // synodic rest: velocities zero
    c.f = f;
    c.Phi = 0.0;
    return jacobi_value(c, sys);
}

} // namespace ks3bp

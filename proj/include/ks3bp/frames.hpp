#pragma once

#include <cmath>
#include <stdexcept>

#include "ks3bp/system.hpp"

namespace ks3bp {

/// Instantaneous distance between the primaries, rho(f) = (1-e^2)/(1+e cos f).
inline double primaries_distance(double f, const SystemParams& sys) {
    return (1.0 - sys.eps * sys.eps) / (1.0 + sys.eps * std::cos(f));
}

/// Rotation by f about the z axis applied to a vector.
inline Vec3 rotate_z(double f, const Vec3& v) {
    const double c = std::cos(f), s = std::sin(f);
    return {c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]};
}

/// df/dt for the Keplerian motion of the primaries (total gravitational
/// parameter 1): df/dt = (1+e cos f)^2 / (1-e^2)^(3/2).
inline double anomaly_rate(double f, const SystemParams& sys) {
    const double w = 1.0 + sys.eps * std::cos(f);
    return w * w / std::pow(1.0 - sys.eps * sys.eps, 1.5);
}

/// Barycentric inertial state of the second primary (mass mu) at anomaly f.
inline InertialState secondary_inertial(double f, const SystemParams& sys) {
    const double rho = primaries_distance(f, sys);
    const double k = 1.0 / std::sqrt(1.0 - sys.eps * sys.eps);
    const Vec3 rel_pos{rho * std::cos(f), rho * std::sin(f), 0.0};
    const Vec3 rel_vel{-k * std::sin(f), k * (sys.eps + std::cos(f)), 0.0};
    return {(1.0 - sys.mu) * rel_pos, (1.0 - sys.mu) * rel_vel};
}

/// Barycentric inertial state of the first primary (mass 1-mu) at anomaly f.
inline InertialState primary_inertial(double f, const SystemParams& sys) {
    const InertialState s2 = secondary_inertial(f, sys);
    const double k = -sys.mu / (1.0 - sys.mu);
    return {k * s2.R, k * s2.V};
}

/// Rotating-pulsating frame -> barycentric inertial.  The frame pulsates with
/// rho(f) and rotates with the primaries: R = rho(f) Rz(f) r.
inline InertialState rotating_to_inertial(const CartesianState& c, const SystemParams& sys) {
    const double f = c.f;
    const double rho = primaries_distance(f, sys);
    const double w = 1.0 + sys.eps * std::cos(f);
    const double drho = rho * sys.eps * std::sin(f) / w; // d(rho)/df
    const double fdot = anomaly_rate(f, sys);

    const Vec3 R = rho * rotate_z(f, c.r);

    // Synodic velocities from the momenta.
    const Vec3 rp{c.p[0] + c.r[1], c.p[1] - c.r[0], c.p[2]};
    // dR/df = rho' Rz r + rho Rz' r + rho Rz r', with Rz' = Rz J.
    const Vec3 Jr{-c.r[1], c.r[0], 0.0};
    const Vec3 dRdf = drho * rotate_z(f, c.r) + rho * rotate_z(f, Jr) + rho * rotate_z(f, rp);
    return {R, fdot * dRdf};
}

/// Barycentric inertial -> rotating-pulsating frame at anomaly f.
/// Phi is not determined by the frame change; the caller sets it
/// (admissible data use Phi = -H).
inline CartesianState inertial_to_rotating(const InertialState& st, double f, const SystemParams& sys) {
    const double rho = primaries_distance(f, sys);
    const double w = 1.0 + sys.eps * std::cos(f);
    const double drho = rho * sys.eps * std::sin(f) / w;
    const double fdot = anomaly_rate(f, sys);

    const Vec3 r = (1.0 / rho) * rotate_z(-f, st.R);
    const Vec3 dRdf = (1.0 / fdot) * st.V;
    // r' = (1/rho) [ Rz^T dR/df - rho' r ] - J r.
    const Vec3 back = rotate_z(-f, dRdf);
    const Vec3 Jr{-r[1], r[0], 0.0};
    const Vec3 rp = (1.0 / rho) * (back - drho * r) - Jr;

    CartesianState c;
    c.r = r;
    c.p = {rp[0] - r[1], rp[1] + r[0], rp[2]};
    c.f = f;
    c.Phi = 0.0;
    return c;
}

/// Solve Kepler's equation E - e sin E = M by Newton iteration.
/// Converges to |residual| <= 1e-13 within 50 iterations for e in [0,1).
inline double solve_kepler(double M, double e) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("solve_kepler: e must be in [0,1)");
    double E = (e < 0.8) ? M : 3.14159265358979323846 * ((M >= 0) - (M < 0));
    if (E == 0.0 && M != 0.0) E = M;
    for (int it = 0; it < 50; ++it) {
        const double g = E - e * std::sin(E) - M;
        if (std::abs(g) <= 1e-13) return E;
        E -= g / (1.0 - e * std::cos(E));
    }
    const double g = E - e * std::sin(E) - M;
    if (std::abs(g) > 1e-13) throw std::runtime_error("solve_kepler: no convergence");
    return E;
}

/// Eccentric -> true anomaly.
inline double eccentric_to_true(double E, double e) {
    return 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(E / 2.0), std::sqrt(1.0 - e) * std::cos(E / 2.0));
}

/// Mean -> true anomaly through Kepler's equation.
inline double mean_to_true(double M, double e) { return eccentric_to_true(solve_kepler(M, e), e); }

/// True -> mean anomaly.
inline double true_to_mean(double nu, double e) {
    const double E = 2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(nu / 2.0), std::sqrt(1.0 + e) * std::cos(nu / 2.0));
    return E - e * std::sin(E);
}

/// Conic-to-state conversion about a focus with gravitational parameter gm.
/// Returns the focus-centric inertial state.
inline InertialState elements_to_cartesian(const OrbitalElements& el, double gm) {
    if (!(el.a > 0.0)) throw std::invalid_argument("elements_to_cartesian: a must be positive");
    if (!(el.e >= 0.0 && el.e < 1.0)) throw std::invalid_argument("elements_to_cartesian: e must be in [0,1)");
    const double p = el.a * (1.0 - el.e * el.e);
    const double nu = el.f_true;
    const double r = p / (1.0 + el.e * std::cos(nu));
    const double vf = std::sqrt(gm / p);

    const Vec3 r_pf{r * std::cos(nu), r * std::sin(nu), 0.0};
    const Vec3 v_pf{-vf * std::sin(nu), vf * (el.e + std::cos(nu)), 0.0};

    const double co = std::cos(el.omega), so = std::sin(el.omega);
    const double ci = std::cos(el.i), si = std::sin(el.i);
    const double cO = std::cos(el.Omega_node), sO = std::sin(el.Omega_node);
    // Rz(Omega) Rx(i) Rz(omega)
    const std::array<Vec3, 3> rot{{
        {cO * co - sO * so * ci, -cO * so - sO * co * ci, sO * si},
        {sO * co + cO * so * ci, -sO * so + cO * co * ci, -cO * si},
        {so * si, co * si, ci},
    }};
    auto apply = [&rot](const Vec3& v) {
        return Vec3{dot(rot[0], v), dot(rot[1], v), dot(rot[2], v)};
    };
    return {apply(r_pf), apply(v_pf)};
}

/// Inverse conversion: osculating elements of a focus-centric state.
/// Planar and near-circular degeneracies collapse the undefined angles to 0.
inline OrbitalElements cartesian_to_elements(const InertialState& st, double gm) {
    const double r = norm(st.R);
    const double v2 = dot(st.V, st.V);
    if (!(r > 0.0)) throw std::invalid_argument("cartesian_to_elements: zero radius");
    const double inv_a = 2.0 / r - v2 / gm;
    if (!(inv_a > 0.0)) throw std::invalid_argument("cartesian_to_elements: orbit is not elliptic");
    const double a = 1.0 / inv_a;

    const Vec3 h{st.R[1] * st.V[2] - st.R[2] * st.V[1], st.R[2] * st.V[0] - st.R[0] * st.V[2],
                 st.R[0] * st.V[1] - st.R[1] * st.V[0]};
    const double hn = norm(h);
    const double rv = dot(st.R, st.V);
    Vec3 evec = (1.0 / gm) * ((v2 - gm / r) * st.R - rv * st.V);
    const double e = norm(evec);

    const double i = std::acos(std::min(1.0, std::max(-1.0, h[2] / hn)));
    const Vec3 node{-h[1], h[0], 0.0};
    const double nn = norm(node);

    const double tiny = 1e-12;
    double Omega = 0.0, omega = 0.0, nu;
    if (nn > tiny) {
        Omega = std::atan2(node[1], node[0]);
    }
    // Reference direction for the pericenter / anomaly angles.
    const Vec3 ref = (nn > tiny) ? (1.0 / nn) * node : Vec3{1.0, 0.0, 0.0};
    if (e > tiny) {
        const Vec3 eu = (1.0 / e) * evec;
        const double ce = std::min(1.0, std::max(-1.0, dot(ref, eu)));
        omega = std::acos(ce);
        // Sign from the component of e out of the reference plane spanned with h.
        const Vec3 cr{ref[1] * eu[2] - ref[2] * eu[1], ref[2] * eu[0] - ref[0] * eu[2], ref[0] * eu[1] - ref[1] * eu[0]};
        if (dot(cr, (1.0 / hn) * h) < 0.0) omega = -omega;
        const double cn = std::min(1.0, std::max(-1.0, dot(eu, (1.0 / r) * st.R)));
        nu = std::acos(cn);
        if (rv < 0.0) nu = -nu;
    } else {
        const double cn = std::min(1.0, std::max(-1.0, dot(ref, (1.0 / r) * st.R)));
        nu = std::acos(cn);
        const Vec3 cr{ref[1] * st.R[2] - ref[2] * st.R[1], ref[2] * st.R[0] - ref[0] * st.R[2],
                      ref[0] * st.R[1] - ref[1] * st.R[0]};
        if (dot(cr, (1.0 / hn) * h) < 0.0) nu = -nu;
    }
    return {a, e, i, omega, Omega, nu};
}

} // namespace ks3bp

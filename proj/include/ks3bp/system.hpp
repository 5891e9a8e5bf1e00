#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ks3bp {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }

template <std::size_t N>
inline std::array<double, N> operator+(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> c;
    for (std::size_t i = 0; i < N; ++i) c[i] = a[i] + b[i];
    return c;
}
template <std::size_t N>
inline std::array<double, N> operator-(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> c;
    for (std::size_t i = 0; i < N; ++i) c[i] = a[i] - b[i];
    return c;
}
template <std::size_t N>
inline std::array<double, N> operator*(double s, const std::array<double, N>& a) {
    std::array<double, N> c;
    for (std::size_t i = 0; i < N; ++i) c[i] = s * a[i];
    return c;
}

/// Physical identity of an elliptic restricted three-body system:
/// mass ratio mu = m2/(m1+m2) and eccentricity eps of the primaries.
struct SystemParams {
    double mu;
    double eps;

    void validate() const {
        if (!(mu > 0.0 && mu < 0.5)) throw std::invalid_argument("SystemParams: mu must be in (0, 1/2)");
        if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("SystemParams: eps must be in [0, 1)");
    }

    /// Hill-sphere radius in the KS norm, mu^(1/6).
    double hill_radius_u() const { return std::pow(mu, 1.0 / 6.0); }
    /// Hill-sphere radius in Cartesian distance, mu^(1/3).
    double hill_radius_q() const { return std::cbrt(mu); }
    /// Conventional Hill radius (mu/3)^(1/3), used for the chi window scale.
    double hill_radius_conventional() const { return std::cbrt(mu / 3.0); }

    static SystemParams sun_jupiter() { return {9.536433730801362e-4, 0.0489}; }
    static SystemParams sun_earth() { return {3.00347e-6, 0.0167}; }

    static SystemParams preset(const std::string& name) {
        if (name == "sun-jupiter") return sun_jupiter();
        if (name == "sun-earth") return sun_earth();
        throw std::invalid_argument("unknown preset: " + name);
    }
};

/// Extended Cartesian state in the rotating-pulsating frame.
/// Phi is the action conjugate to the true anomaly; on admissible data
/// Phi = -H so that the extended Hamiltonian H + Phi vanishes.
struct CartesianState {
    Vec3 r;     // (x, y, z)
    Vec3 p;     // conjugate momenta (p1, p2, p3)
    double f;   // true anomaly (covering space, radians)
    double Phi; // energy action

    double d1(const SystemParams& sys) const {
        const Vec3 d{r[0] + sys.mu, r[1], r[2]};
        return norm(d);
    }
    double d2(const SystemParams& sys) const {
        const Vec3 d{r[0] - 1.0 + sys.mu, r[1], r[2]};
        return norm(d);
    }
};

/// Regularized 10-dimensional state: KS coordinates u, extended angle phi,
/// conjugate momenta U, action Phi, plus the proper time s it belongs to.
struct KSState {
    Vec4 u;
    double phi;
    Vec4 U;
    double Phi;
    double s;
};

/// Barycentric inertial position and velocity (time derivative).
struct InertialState {
    Vec3 R;
    Vec3 V;
};

/// Osculating Keplerian elements, angles in radians.
struct OrbitalElements {
    double a;
    double e;
    double i;
    double omega;      // argument of pericenter
    double Omega_node; // longitude of ascending node
    double f_true;     // true anomaly
};

// Flat ODE-state packing used by the integrator.

inline std::array<double, 10> pack(const KSState& k) {
    return {k.u[0], k.u[1], k.u[2], k.u[3], k.phi, k.U[0], k.U[1], k.U[2], k.U[3], k.Phi};
}
inline KSState unpack_ks(const std::array<double, 10>& y, double s) {
    return {{y[0], y[1], y[2], y[3]}, y[4], {y[5], y[6], y[7], y[8]}, y[9], s};
}

inline std::array<double, 7> pack(const CartesianState& c) {
    return {c.r[0], c.r[1], c.r[2], c.p[0], c.p[1], c.p[2], c.Phi};
}
inline CartesianState unpack_cartesian(const std::array<double, 7>& y, double f) {
    return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}, f, y[6]};
}

} // namespace ks3bp

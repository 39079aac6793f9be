#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace thinprobe {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Truncated Taylor jet along a single seed direction: value, first and second
// directional derivatives. Seeding x_k gives d/dx_k and d^2/dx_k^2 in one pass.
struct Jet {
    double v = 0.0;
    double d = 0.0;
    double dd = 0.0;

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}  // NOLINT: implicit on purpose
    constexpr Jet(double value, double d1, double d2) : v(value), d(d1), dd(d2) {}

    static constexpr Jet seed(double x) { return {x, 1.0, 0.0}; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.d, s * a.dd}; }
inline Jet operator*(const Jet& a, double s) { return s * a; }
inline Jet operator/(const Jet& a, double s) { return {a.v / s, a.d / s, a.dd / s}; }

// Push a jet through a scalar function with known g, g', g''.
inline Jet chain(const Jet& a, double g, double g1, double g2) {
    return {g, g1 * a.d, g2 * a.d * a.d + g1 * a.dd};
}

inline Jet recip(const Jet& a) {
    const double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }
inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

inline Jet exp(const Jet& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Jet sin(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, c, -s, -c);
}
inline Jet sqrt(const Jet& a) {
    const double r = std::sqrt(a.v);
    return chain(a, r, 0.5 / r, -0.25 / (r * a.v));
}
inline Jet square(const Jet& a) { return a * a; }
inline Jet cube(const Jet& a) { return a * a * a; }

using JetVec = std::array<Jet, 3>;

struct JetPoint {
    JetVec x{};
    Jet t{};
};

// Plain evaluation point with no seeded direction.
inline JetPoint constant_point(const Vec3& x, double t) {
    return {{Jet(x[0]), Jet(x[1]), Jet(x[2])}, Jet(t)};
}

// axis in [0,3): spatial seed; axis == 3: time seed.
inline JetPoint seeded_point(const Vec3& x, double t, int axis) {
    JetPoint p = constant_point(x, t);
    if (axis < 3)
        p.x[axis].d = 1.0;
    else
        p.t.d = 1.0;
    return p;
}

inline Vec3 values_of(const JetVec& v) { return {v[0].v, v[1].v, v[2].v}; }
inline Vec3 firsts_of(const JetVec& v) { return {v[0].d, v[1].d, v[2].d}; }

}  // namespace thinprobe

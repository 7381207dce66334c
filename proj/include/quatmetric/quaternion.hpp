#pragma once

#include <cmath>
#include <complex>
#include <ostream>

#include "errors.hpp"

namespace quatmetric {

/// Element of the real division algebra H, stored as w + x i + y j + z k.
///
/// Scalars act on vectors from the right throughout the library, so the
/// order of factors in every product below is significant.
template <typename Real>
struct BasicQuaternion {
    using value_type = Real;
    using complex_type = std::complex<Real>;

    Real w{}, x{}, y{}, z{};

    constexpr BasicQuaternion() = default;
    constexpr BasicQuaternion(Real w_, Real x_ = Real{}, Real y_ = Real{}, Real z_ = Real{})
        : w(w_), x(x_), y(y_), z(z_) {}
    // Complex numbers sit in the span of {1, i}.
    constexpr BasicQuaternion(complex_type c) : w(c.real()), x(c.imag()) {}

    static constexpr BasicQuaternion i() { return {0, 1, 0, 0}; }
    static constexpr BasicQuaternion j() { return {0, 0, 1, 0}; }
    static constexpr BasicQuaternion k() { return {0, 0, 0, 1}; }

    constexpr Real real() const { return w; }
    constexpr BasicQuaternion imag() const { return {0, x, y, z}; }
    constexpr Real norm2() const { return w * w + x * x + y * y + z * z; }
    Real abs() const { return std::sqrt(norm2()); }

    constexpr bool is_complex() const { return y == Real{} && z == Real{}; }
    constexpr complex_type to_complex() const { return {w, x}; }

    constexpr BasicQuaternion operator-() const { return {-w, -x, -y, -z}; }

    constexpr BasicQuaternion& operator+=(const BasicQuaternion& o) {
        w += o.w, x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr BasicQuaternion& operator-=(const BasicQuaternion& o) {
        w -= o.w, x -= o.x, y -= o.y, z -= o.z;
        return *this;
    }
    constexpr BasicQuaternion& operator*=(Real s) {
        w *= s, x *= s, y *= s, z *= s;
        return *this;
    }
    constexpr BasicQuaternion& operator*=(const BasicQuaternion& o) { return *this = *this * o; }

    friend constexpr BasicQuaternion operator+(BasicQuaternion a, const BasicQuaternion& b) { return a += b; }
    friend constexpr BasicQuaternion operator-(BasicQuaternion a, const BasicQuaternion& b) { return a -= b; }
    friend constexpr BasicQuaternion operator*(BasicQuaternion a, Real s) { return a *= s; }
    friend constexpr BasicQuaternion operator*(Real s, BasicQuaternion a) { return a *= s; }
    friend constexpr BasicQuaternion operator/(BasicQuaternion a, Real s) { return a *= (Real{1} / s); }

    // Hamilton product.
    friend constexpr BasicQuaternion operator*(const BasicQuaternion& p, const BasicQuaternion& q) {
        return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
                p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
                p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
                p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
    }

    friend constexpr bool operator==(const BasicQuaternion&, const BasicQuaternion&) = default;

    friend std::ostream& operator<<(std::ostream& os, const BasicQuaternion& q) {
        return os << '(' << q.w << ' ' << std::showpos << q.x << "i " << q.y << "j " << q.z << 'k'
                  << std::noshowpos << ')';
    }
};

using Quaternion = BasicQuaternion<double>;
using Complex = std::complex<double>;

template <typename Real>
constexpr BasicQuaternion<Real> mul(const BasicQuaternion<Real>& p, const BasicQuaternion<Real>& q) {
    return p * q;
}

template <typename Real>
constexpr BasicQuaternion<Real> conj(const BasicQuaternion<Real>& q) {
    return {q.w, -q.x, -q.y, -q.z};
}

template <typename Real>
Real abs(const BasicQuaternion<Real>& q) {
    return q.abs();
}

template <typename Real>
BasicQuaternion<Real> inverse(const BasicQuaternion<Real>& q) {
    const Real n2 = q.norm2();
    if (!(std::sqrt(n2) >= Real(1e-300))) throw ZeroDivisor("quaternion has no inverse");
    return conj(q) * (Real{1} / n2);
}

/// Components of q = a + b j with a, b complex. Note b multiplies j from
/// the left, so b j = Re(b) j + Im(b) k.
template <typename Real>
struct BasicComplexPair {
    std::complex<Real> a, b;
    friend constexpr bool operator==(const BasicComplexPair&, const BasicComplexPair&) = default;
};

using ComplexPair = BasicComplexPair<double>;

template <typename Real>
constexpr BasicComplexPair<Real> split(const BasicQuaternion<Real>& q) {
    return {{q.w, q.x}, {q.y, q.z}};
}

template <typename Real>
constexpr BasicQuaternion<Real> join(std::complex<Real> a, std::complex<Real> b) {
    return {a.real(), a.imag(), b.real(), b.imag()};
}

/// Unit u with conj(u) * q * u = i |Im q| + Re q, i.e. the rotation that
/// carries q to its complex representative with nonnegative imaginary part.
template <typename Real>
BasicQuaternion<Real> rotation_to_complex(const BasicQuaternion<Real>& q) {
    using Q = BasicQuaternion<Real>;
    const Q v = q.imag();
    const Real r = v.abs();
    if (r == Real{}) return Q{1};
    const Q n = v / r;
    // u = (1 - n i)/|1 - n i| maps i to n under u i conj(u); we need the
    // inverse orientation, conj(u) n u = i.
    Q u = Q{1} - n * Q::i();
    const Real un = u.abs();
    if (un < Real(1e-8)) return Q::j();  // n == -i
    return u / un;
}

}  // namespace quatmetric

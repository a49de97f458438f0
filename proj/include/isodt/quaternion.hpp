#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace isodt {

using Complex = std::complex<double>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Default relative threshold for singularity tests; multiply by the scale
// of the operand before comparing.
inline constexpr double kSingularEps = 1e-12;

/// Quaternion q = w + x i + y j + z k, with i^2 = j^2 = k^2 = ijk = -1.
///
/// The complex-pair view q = a + j b (a = w + x i, b = y - z i) identifies
/// H with C + jC, the complex structure acting by right multiplication
/// with i. This convention is frozen: multiplier extraction depends on it.
struct Quat {
    double w = 0, x = 0, y = 0, z = 0;

    constexpr Quat() = default;
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quat from_pair(Complex a, Complex b) {
        return {a.real(), a.imag(), b.real(), -b.imag()};
    }
    static Quat real(double r) { return {r, 0, 0, 0}; }
    static Quat vec(double x_, double y_, double z_) { return {0, x_, y_, z_}; }

    Complex ca() const { return {w, x}; }
    Complex cb() const { return {y, -z}; }

    Quat operator-() const { return {-w, -x, -y, -z}; }
    Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    Quat& operator+=(const Quat& o) { w += o.w; x += o.x; y += o.y; z += o.z; return *this; }
    Quat& operator-=(const Quat& o) { w -= o.w; x -= o.x; y -= o.y; z -= o.z; return *this; }

    Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
    Quat& operator*=(double s) { w *= s; x *= s; y *= s; z *= s; return *this; }

    // Hamilton product.
    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Quat conj() const { return {w, -x, -y, -z}; }
    double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    double re() const { return w; }
    Quat im() const { return {0, x, y, z}; }

    /// Inverse; throws when |q| <= eps * scale.
    Quat inv(double scale = 1.0, double eps = kSingularEps) const {
        const double n2 = norm2();
        const double thr = eps * scale;
        if (n2 <= thr * thr) throw Error("singular quaternion");
        return conj() * (1.0 / n2);
    }
};

inline Quat operator*(double s, const Quat& q) { return q * s; }

/// Euclidean inner product on H = R^4.
inline double dot(const Quat& a, const Quat& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Right multiplication by a complex scalar (q * (a + b i) with i acting
/// from the right); the coordinates of the complex pair scale by c.
inline Quat cmul_right(const Quat& q, Complex c) {
    return Quat::from_pair(q.ca() * c, q.cb() * c);
}

inline const Quat kOne{1, 0, 0, 0};
inline const Quat kI{0, 1, 0, 0};
inline const Quat kJ{0, 0, 1, 0};
inline const Quat kK{0, 0, 0, 1};

/// Element of H^2, a column vector (top, bottom)^T. Quaternionic scalars
/// act on the right, endomorphisms on the left.
struct HVec2 {
    Quat top, bottom;

    HVec2 operator+(const HVec2& o) const { return {top + o.top, bottom + o.bottom}; }
    HVec2 operator-(const HVec2& o) const { return {top - o.top, bottom - o.bottom}; }
    HVec2 operator-() const { return {-top, -bottom}; }
    HVec2 operator*(const Quat& q) const { return {top * q, bottom * q}; }
    HVec2 operator*(double s) const { return {top * s, bottom * s}; }
    HVec2& operator+=(const HVec2& o) { top += o.top; bottom += o.bottom; return *this; }

    double norm2() const { return top.norm2() + bottom.norm2(); }
    double norm() const { return std::sqrt(norm2()); }
};

/// 2x2 quaternionic matrix [[a, b], [c, d]] acting on HVec2 from the left.
struct HEndo2 {
    Quat a, b, c, d;

    static HEndo2 identity() { return {kOne, Quat{}, Quat{}, kOne}; }
    static HEndo2 zero() { return {}; }

    HVec2 operator*(const HVec2& v) const {
        return {a * v.top + b * v.bottom, c * v.top + d * v.bottom};
    }
    HEndo2 operator*(const HEndo2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    HEndo2 operator+(const HEndo2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    HEndo2 operator-(const HEndo2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    HEndo2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

    double norm() const { return std::sqrt(a.norm2() + b.norm2() + c.norm2() + d.norm2()); }
};

inline HVec2 endo_apply(const HEndo2& A, const HVec2& v) { return A * v; }

using ComplexMatrix4 = Eigen::Matrix4cd;
using ComplexVector4 = Eigen::Vector4cd;

/// Image of an HEndo2 in C^{4x4} under H^2 = C^4 (right-i structure).
/// Algebra homomorphism: complexify(A*B) = complexify(A)*complexify(B).
ComplexMatrix4 complexify(const HEndo2& A);
HEndo2 decomplexify(const ComplexMatrix4& M);

ComplexVector4 complexify(const HVec2& v);
HVec2 decomplexify(const ComplexVector4& v);

/// Inverse through the complexified 4x4 matrix; throws on singular input.
HEndo2 endo_inv(const HEndo2& A, double eps = kSingularEps);

}  // namespace isodt

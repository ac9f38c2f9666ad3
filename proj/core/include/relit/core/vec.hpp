// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>

#include "relit/errors.hpp"

namespace relit {

template <typename T>
struct Vec2 {
    T x = 0, y = 0;

    Vec2() = default;
    Vec2(T x_, T y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(T s) const { return {x * s, y * s}; }
};

template <typename T>
struct Vec3 {
    T x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(T s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(T s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(T s) { x *= s; y *= s; z *= s; return *this; }

    T& operator[](int i) { return (&x)[i]; }
    T operator[](int i) const { return (&x)[i]; }
};

template <typename T>
inline Vec3<T> operator*(T s, const Vec3<T>& v) { return v * s; }

template <typename T>
inline T dot(const Vec3<T>& a, const Vec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

template <typename T>
inline Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
inline Vec3<T> cmul(const Vec3<T>& a, const Vec3<T>& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

template <typename T>
inline T length2(const Vec3<T>& v) { return dot(v, v); }

template <typename T>
inline T length(const Vec3<T>& v) { return std::sqrt(dot(v, v)); }

template <typename T>
inline Vec3<T> normalize(const Vec3<T>& v) {
    T len = length(v);
    return v / len;
}

template <typename T>
struct Vec4 {
    T x = 0, y = 0, z = 0, w = 0;

    Vec4() = default;
    Vec4(T x_, T y_, T z_, T w_) : x(x_), y(y_), z(z_), w(w_) {}

    T& operator[](int i) { return (&x)[i]; }
    T operator[](int i) const { return (&x)[i]; }
};

/// Column-major 3x3 matrix: col(j) is the j-th basis vector.
template <typename T>
struct Mat3 {
    // m[j] is column j.
    Vec3<T> c0, c1, c2;

    Mat3() : c0(1, 0, 0), c1(0, 1, 0), c2(0, 0, 1) {}
    Mat3(const Vec3<T>& a, const Vec3<T>& b, const Vec3<T>& c) : c0(a), c1(b), c2(c) {}

    static Mat3 identity() { return Mat3(); }

    static Mat3 diag(const Vec3<T>& d) {
        return Mat3({d.x, 0, 0}, {0, d.y, 0}, {0, 0, d.z});
    }

    Vec3<T> col(int j) const { return j == 0 ? c0 : (j == 1 ? c1 : c2); }

    T operator()(int i, int j) const { return (&(j == 0 ? c0 : (j == 1 ? c1 : c2)).x)[i]; }
    T& operator()(int i, int j) {
        Vec3<T>& c = (j == 0 ? c0 : (j == 1 ? c1 : c2));
        return (&c.x)[i];
    }

    Vec3<T> operator*(const Vec3<T>& v) const { return c0 * v.x + c1 * v.y + c2 * v.z; }

    Mat3 operator*(const Mat3& o) const { return Mat3(*this * o.c0, *this * o.c1, *this * o.c2); }

    Mat3 operator+(const Mat3& o) const { return Mat3(c0 + o.c0, c1 + o.c1, c2 + o.c2); }

    Mat3 operator*(T s) const { return Mat3(c0 * s, c1 * s, c2 * s); }

    Mat3 transposed() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
        return t;
    }

    T det() const { return dot(c0, cross(c1, c2)); }
};

/// Transpose-multiply: M^T * v without materializing the transpose.
template <typename T>
inline Vec3<T> tmul(const Mat3<T>& m, const Vec3<T>& v) {
    return {dot(m.c0, v), dot(m.c1, v), dot(m.c2, v)};
}

template <typename T>
inline Mat3<T> outer(const Vec3<T>& a, const Vec3<T>& b) {
    return Mat3<T>(a * b.x, a * b.y, a * b.z);
}

template <typename T>
inline Mat3<T> inverse(const Mat3<T>& m) {
    T d = m.det();
    if (std::abs(d) < T(1e-300)) throw InvalidInput("Mat3::inverse: singular matrix");
    Mat3<T> adj(cross(m.c1, m.c2), cross(m.c2, m.c0), cross(m.c0, m.c1));
    // adj holds cross products as columns; the inverse is their transpose / det.
    return adj.transposed() * (T(1) / d);
}

/// Solve m x = b by Cramer's rule; throws on a singular system.
template <typename T>
inline Vec3<T> solve3(const Mat3<T>& m, const Vec3<T>& b) {
    return inverse(m) * b;
}

using Vec2f = Vec2<float>;
using Vec2d = Vec2<double>;
using Vec3f = Vec3<float>;
using Vec3d = Vec3<double>;
using Vec4f = Vec4<float>;
using Vec4d = Vec4<double>;
using Mat3f = Mat3<float>;
using Mat3d = Mat3<double>;

}  // namespace relit

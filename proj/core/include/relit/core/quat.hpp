// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "relit/core/vec.hpp"

namespace relit {

/// Hamilton quaternion, scalar part first. Rotation helpers assume unit norm.
template <typename T>
struct Quat {
    T w = 1, x = 0, y = 0, z = 0;

    Quat() = default;
    Quat(T w_, T x_, T y_, T z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quat identity() { return Quat(); }

    static Quat axis_angle(const Vec3<T>& axis, T angle) {
        Vec3<T> u = normalize(axis);
        T h = angle / T(2);
        T s = std::sin(h);
        return Quat(std::cos(h), u.x * s, u.y * s, u.z * s);
    }

    T norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        T n = norm();
        return Quat(w / n, x / n, y / n, z / n);
    }

    Quat operator*(const Quat& o) const {
        return Quat(w * o.w - x * o.x - y * o.y - z * o.z,
                    w * o.x + x * o.w + y * o.z - z * o.y,
                    w * o.y - x * o.z + y * o.w + z * o.x,
                    w * o.z + x * o.y - y * o.x + z * o.w);
    }

    Mat3<T> to_matrix() const {
        T xx = x * x, yy = y * y, zz = z * z;
        T xy = x * y, xz = x * z, yz = y * z;
        T wx = w * x, wy = w * y, wz = w * z;
        Mat3<T> r;
        r(0, 0) = 1 - 2 * (yy + zz); r(0, 1) = 2 * (xy - wz);     r(0, 2) = 2 * (xz + wy);
        r(1, 0) = 2 * (xy + wz);     r(1, 1) = 1 - 2 * (xx + zz); r(1, 2) = 2 * (yz - wx);
        r(2, 0) = 2 * (xz - wy);     r(2, 1) = 2 * (yz + wx);     r(2, 2) = 1 - 2 * (xx + yy);
        return r;
    }
};

using Quatf = Quat<float>;
using Quatd = Quat<double>;

}  // namespace relit

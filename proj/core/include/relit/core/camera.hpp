// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "relit/core/vec.hpp"
#include "relit/errors.hpp"

namespace relit {

/// Pinhole camera. Camera space is +x right, +y down, +z forward; a world
/// point p maps to cam = R * p + t and pixel (fx * cam.x / cam.z + cx,
/// fy * cam.y / cam.z + cy). Pixel (u, v) indexes the center of that pixel
/// at (u + 0.5, v + 0.5).
template <typename T>
struct Camera {
    int width = 0, height = 0;
    T fx = 0, fy = 0, cx = 0, cy = 0;
    Mat3<T> rot;    // world-to-camera rotation
    Vec3<T> trans;  // world-to-camera translation

    Vec3<T> to_camera(const Vec3<T>& p) const { return rot * p + trans; }

    Vec2<T> project(const Vec3<T>& cam) const {
        return {fx * cam.x / cam.z + cx, fy * cam.y / cam.z + cy};
    }

    /// Camera center in world coordinates.
    Vec3<T> center() const { return tmul(rot, trans) * T(-1); }

    /// Unit view direction in world space from a world point toward the camera.
    Vec3<T> view_dir(const Vec3<T>& p) const { return normalize(center() - p); }

    /// Builds a camera at `eye` looking at `target`. `up_hint` picks the roll;
    /// it must not be parallel to the view direction.
    static Camera look_at(const Vec3<T>& eye, const Vec3<T>& target, const Vec3<T>& up_hint,
                          int width, int height, T focal) {
        Vec3<T> fwd = normalize(target - eye);
        Vec3<T> right = cross(fwd, up_hint);
        if (length(right) < T(1e-8)) throw InvalidInput("Camera::look_at: up parallel to view");
        right = normalize(right);
        Vec3<T> down = cross(fwd, right);
        Camera c;
        c.width = width;
        c.height = height;
        c.fx = c.fy = focal;
        c.cx = T(width) / T(2);
        c.cy = T(height) / T(2);
        // Rows of the world-to-camera rotation are the camera axes.
        c.rot = Mat3<T>(right, down, fwd).transposed();
        c.trans = c.rot * eye * T(-1);
        return c;
    }
};

using Cameraf = Camera<float>;
using Camerad = Camera<double>;

/// Converts between the two scalar widths without touching geometry.
template <typename To, typename From>
inline Camera<To> camera_cast(const Camera<From>& c) {
    Camera<To> o;
    o.width = c.width;
    o.height = c.height;
    o.fx = To(c.fx);
    o.fy = To(c.fy);
    o.cx = To(c.cx);
    o.cy = To(c.cy);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) o.rot(i, j) = To(c.rot(i, j));
    o.trans = {To(c.trans.x), To(c.trans.y), To(c.trans.z)};
    return o;
}

}  // namespace relit

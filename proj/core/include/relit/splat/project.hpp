// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "relit/core/camera.hpp"
#include "relit/core/vec.hpp"
#include "relit/splat/types.hpp"

namespace relit::splat {

/// Primitives closer than this to the camera plane are culled.
inline constexpr double kNearPlane = 1e-3;

/// Screen-space footprint: pixel-space mean, symmetric 2x2 covariance
/// (a, b; b, c), and the view depth used for compositing order.
template <typename T>
struct ProjectedSplat {
    Vec2<T> mean{};
    T cov_a = T(0), cov_b = T(0), cov_c = T(0);
    T depth = T(0);
};

/// First-order perspective projection of a world-space gaussian. Returns
/// false when the mean lies behind the near plane.
template <typename T>
bool project_ewa(const PosedGaussian<T>& g, const Camera<T>& cam, ProjectedSplat<T>* out) {
    Vec3<T> p = cam.to_camera(g.mean);
    if (p.z <= T(kNearPlane)) return false;

    T inv_z = T(1) / p.z;
    out->mean = {cam.fx * p.x * inv_z + cam.cx, cam.fy * p.y * inv_z + cam.cy};
    out->depth = p.z;

    // Covariance in camera axes, then through the projection Jacobian at p.
    Mat3<T> cov_cam = cam.rot * g.cov * cam.rot.transposed();
    T jx = cam.fx * inv_z, jy = cam.fy * inv_z;
    T jxz = -cam.fx * p.x * inv_z * inv_z, jyz = -cam.fy * p.y * inv_z * inv_z;
    // Rows of J: (jx, 0, jxz) and (0, jy, jyz).
    Vec3<T> r0{jx, T(0), jxz}, r1{T(0), jy, jyz};
    Vec3<T> c0 = cov_cam * r0, c1 = cov_cam * r1;
    out->cov_a = dot(r0, c0);
    out->cov_b = dot(r0, c1);
    out->cov_c = dot(r1, c1);
    return true;
}

}  // namespace relit::splat

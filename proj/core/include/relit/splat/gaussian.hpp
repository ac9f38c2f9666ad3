// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>

#include "relit/core/quat.hpp"
#include "relit/core/vec.hpp"

namespace relit::splat {

/// Decoded scale bounds in scene units. The activation maps raw network
/// output into this range, so extents can neither vanish nor explode.
inline constexpr double kScaleMin = 1e-4;
inline constexpr double kScaleMax = 0.1;

/// One primitive's full attribute set: static parameters learned once plus
/// the per-frame heads decoded from the dynamics network.
struct GaussianPrimitive {
    int texel = -1;
    Vec3d mu_local{};
    Vec3d albedo{0.5, 0.5, 0.5};
    double roughness = 0.5;
    Vec3d delta_mu{};
    Quatd rotation = Quatd::identity();
    Vec3d scale{1e-3, 1e-3, 1e-3};
    double opacity = 0.5;
    std::array<double, 32> f_expr{};
};

/// Bounded exponential activation: raw in R maps to [kScaleMin, kScaleMax]
/// on a log scale, with the midpoint at raw = 0.
template <typename T>
T decode_scale(T raw) {
    T lo = std::log(T(kScaleMin)), hi = std::log(T(kScaleMax));
    T s = raw >= T(0) ? T(1) / (T(1) + std::exp(-raw)) : std::exp(raw) / (T(1) + std::exp(raw));
    return std::exp(lo + s * (hi - lo));
}

template <typename T>
T decode_opacity(T raw) {
    return raw >= T(0) ? T(1) / (T(1) + std::exp(-raw)) : std::exp(raw) / (T(1) + std::exp(raw));
}

/// Raw 4-vector decodes to a unit quaternion; zero input is the identity.
template <typename T>
Quat<T> decode_rotation(const Vec4<T>& raw) {
    Quat<T> q{raw.x + T(1), raw.y, raw.z, raw.w};
    return q.normalized();
}

}  // namespace relit::splat

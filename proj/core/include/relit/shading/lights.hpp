// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "relit/core/sh.hpp"
#include "relit/core/vec.hpp"
#include "relit/errors.hpp"

namespace relit::shading {

/// Spherical-harmonics degree used to feed light patterns to the diffuse
/// reflectance network.
inline constexpr int kLightShDegree = 6;

/// Emitter with inverse-square falloff. `intensity` is radiant intensity
/// per channel; the radiance arriving at distance d is intensity / d^2.
template <typename T>
struct PointLight {
    Vec3<T> position{};
    Vec3<T> intensity{T(1), T(1), T(1)};
};

using PointLightf = PointLight<float>;
using PointLightd = PointLight<double>;

/// Direction and per-channel radiance of one emitter as seen from a point.
inline void light_at_point(const PointLight<double>& light, const Vec3d& point, Vec3d* dir,
                           Vec3d* radiance) {
    Vec3d to = light.position - point;
    double d2 = dot(to, to);
    if (d2 < 1e-12) throw InvalidInput("light_at_point: emitter coincides with shading point");
    *dir = to * (1.0 / std::sqrt(d2));
    *radiance = light.intensity * (1.0 / d2);
}

/// Projects a point-light pattern onto SH as seen from `point`: each emitter
/// enters as a directional delta weighted by its falloff radiance. Returns
/// one RGB triple per coefficient.
inline std::vector<Vec3d> light_pattern_sh(int degree, const Vec3d& point,
                                           const std::vector<PointLight<double>>& lights) {
    std::vector<Vec3d> out(sh::coeff_count(degree), Vec3d(0, 0, 0));
    std::vector<double> basis(sh::coeff_count(degree));
    for (const auto& light : lights) {
        Vec3d dir, radiance;
        light_at_point(light, point, &dir, &radiance);
        sh::eval(degree, dir, basis.data());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += radiance * basis[i];
    }
    return out;
}

/// True when every emitter carries the same value on all three channels, in
/// which case one reflectance evaluation serves all of them.
inline bool is_monochrome(const std::vector<PointLight<double>>& lights) {
    for (const auto& light : lights)
        if (light.intensity.x != light.intensity.y || light.intensity.x != light.intensity.z)
            return false;
    return true;
}

}  // namespace relit::shading

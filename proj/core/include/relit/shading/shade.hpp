// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "relit/core/sh.hpp"
#include "relit/core/vec.hpp"
#include "relit/errors.hpp"
#include "relit/shading/brdf.hpp"
#include "relit/shading/lights.hpp"

namespace relit::shading {

/// Monochrome diffuse reflectance: one channel of light SH coefficients
/// (coeff_count(kLightShDegree) values) plus the expression features map to a
/// scalar reflectance. The same function serves all three color channels.
using DiffuseReflectanceFn =
    std::function<double(const double* light_sh, const double* f_expr)>;

/// Diffuse color of one texel: albedo times the per-channel reflectance of
/// the light pattern. Equal-channel light collapses to a single evaluation.
inline Vec3d diffuse_color(const MaterialSample<double>& mat, const std::vector<Vec3d>& light_sh,
                           const DiffuseReflectanceFn& fd) {
    const int n = sh::coeff_count(kLightShDegree);
    if (int(light_sh.size()) != n)
        throw InvalidInput("diffuse_color: light SH must carry degree " +
                           std::to_string(kLightShDegree));
    bool equal_channels = true;
    for (const Vec3d& c : light_sh)
        if (c.x != c.y || c.x != c.z) {
            equal_channels = false;
            break;
        }
    std::vector<double> channel(n);
    if (equal_channels) {
        for (int i = 0; i < n; ++i) channel[i] = light_sh[i].x;
        double refl = fd(channel.data(), mat.f_expr.data());
        return mat.albedo * refl;
    }
    Vec3d refl;
    for (int ch = 0; ch < 3; ++ch) {
        for (int i = 0; i < n; ++i) channel[i] = light_sh[i][ch];
        refl[ch] = fd(channel.data(), mat.f_expr.data());
    }
    return cmul(mat.albedo, refl);
}

/// Full color of one texel under a point-light pattern: the diffuse response
/// to the pattern's SH projection plus the glossy term summed over emitters,
/// each weighted by falloff radiance and the clamped incidence cosine.
inline Vec3d shade_point_lights(const MaterialSample<double>& mat, const Vec3d& position,
                                const Vec3d& wo, const std::vector<PointLight<double>>& lights,
                                const DiffuseReflectanceFn& fd, double f0 = kDefaultF0) {
    if (lights.empty()) throw InvalidInput("shade_point_lights: no emitters");
    std::vector<Vec3d> light_sh = light_pattern_sh(kLightShDegree, position, lights);
    Vec3d color = diffuse_color(mat, light_sh, fd);
    for (const auto& light : lights) {
        Vec3d wi, radiance;
        light_at_point(light, position, &wi, &radiance);
        double cos_ni = dot(mat.normal, wi);
        if (cos_ni <= 0) continue;
        double fs = specular_point_brdf(wi, wo, mat, f0);
        color += radiance * (fs * cos_ni);
    }
    return color;
}

}  // namespace relit::shading

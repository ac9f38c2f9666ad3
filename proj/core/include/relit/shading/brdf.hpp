// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "relit/core/vec.hpp"

namespace relit::shading {

/// Width of the expression feature vector attached to every texel.
inline constexpr int kExprFeatureDim = 32;

/// Exponents of the two glossy lobes blended by the roughness parameter.
inline constexpr double kBroadLobeExponent = 12.0;
inline constexpr double kSharpLobeExponent = 48.0;

/// Head-on reflectance of skin-like dielectrics.
inline constexpr double kDefaultF0 = 0.04;

/// Lower clamp for the cosine terms in the specular denominator.
inline constexpr double kCosineGuard = 1e-4;

/// Per-texel reflectance inputs for one shading evaluation.
template <typename T>
struct MaterialSample {
    Vec3<T> albedo{T(0.5), T(0.5), T(0.5)};
    T roughness = T(0.5);
    T specular = T(0);
    Vec3<T> normal{T(0), T(0), T(1)};
    std::array<T, kExprFeatureDim> f_expr{};
};

using MaterialSamplef = MaterialSample<float>;
using MaterialSampled = MaterialSample<double>;

namespace detail {

template <typename T>
T clamp01(T v) {
    return std::clamp(v, T(0), T(1));
}

}  // namespace detail

/// Glossy lobe density over half vectors, normalized so the projected
/// integral over the hemisphere is one.
template <typename T>
T glossy_lobe(T cos_nh, T exponent) {
    if (cos_nh <= T(0)) return T(0);
    T norm = (exponent + T(2)) / (T(2) * std::numbers::pi_v<T>);
    return norm * std::pow(cos_nh, exponent);
}

/// Microfacet density: roughness linearly blends a broad and a sharp lobe,
/// with r = 1 the roughest. Inputs outside [0, 1] are clamped.
template <typename T>
T ndf_mix(T cos_nh, T r) {
    cos_nh = detail::clamp01(cos_nh);
    r = detail::clamp01(r);
    return r * glossy_lobe(cos_nh, T(kBroadLobeExponent)) +
           (T(1) - r) * glossy_lobe(cos_nh, T(kSharpLobeExponent));
}

/// Schlick reflectance ramp from head-on f0 up to one at grazing.
template <typename T>
T fresnel_schlick(T cos_vh, T f0) {
    T m = T(1) - detail::clamp01(cos_vh);
    T m2 = m * m;
    return f0 + (T(1) - f0) * m2 * m2 * m;
}

/// Blend-equivalent exponent at roughness r.
template <typename T>
T blended_exponent(T r) {
    r = detail::clamp01(r);
    return r * T(kBroadLobeExponent) + (T(1) - r) * T(kSharpLobeExponent);
}

/// Beckmann width matching a glossy lobe of the given exponent.
template <typename T>
T beckmann_width(T exponent) {
    return std::sqrt(T(2) / (exponent + T(2)));
}

/// One-directional shadowing factor: Walter's rational fit of the Beckmann
/// integral, saturating to one once the direction leaves the horizon region.
/// The fit overshoots one by ~6e-5 just before its cutover point, so the
/// value is clamped, which also keeps it monotone and continuous there.
template <typename T>
T shadowing_g1(T cos_theta, T width) {
    if (cos_theta <= T(0)) return T(0);
    if (cos_theta >= T(1)) return T(1);
    T sin_theta = std::sqrt(T(1) - cos_theta * cos_theta);
    T a = cos_theta / (width * sin_theta);
    if (a >= T(1.6)) return T(1);
    T rational = (T(3.535) * a + T(2.181) * a * a) / (T(1) + T(2.276) * a + T(2.577) * a * a);
    return std::min(rational, T(1));
}

/// Joint masking and shadowing for the blended lobe at roughness r.
template <typename T>
T geometry_term(T cos_no, T cos_ni, T r) {
    if (cos_no <= T(0) || cos_ni <= T(0)) return T(0);
    T width = beckmann_width(blended_exponent(r));
    return shadowing_g1(cos_no, width) * shadowing_g1(cos_ni, width);
}

/// Glossy reflectance density for one light and view direction: intensity
/// times density, shadowing, and Fresnel over the standard four-cosine
/// denominator. Below-horizon configurations yield zero; the denominator
/// cosines are clamped so grazing angles stay finite.
template <typename T>
T specular_point_brdf(const Vec3<T>& wi, const Vec3<T>& wo, const MaterialSample<T>& mat,
                      T f0 = T(kDefaultF0)) {
    T cos_ni = dot(mat.normal, wi);
    T cos_no = dot(mat.normal, wo);
    if (cos_ni <= T(0) || cos_no <= T(0) || mat.specular <= T(0)) return T(0);
    Vec3<T> h = wi + wo;
    T hlen = length(h);
    if (hlen < T(1e-8)) return T(0);
    h = h * (T(1) / hlen);
    T d = ndf_mix(dot(mat.normal, h), mat.roughness);
    T g = geometry_term(cos_no, cos_ni, mat.roughness);
    T f = fresnel_schlick(dot(wo, h), f0);
    T denom = T(4) * std::max(cos_no, T(kCosineGuard)) * std::max(cos_ni, T(kCosineGuard));
    return mat.specular * d * g * f / denom;
}

}  // namespace relit::shading

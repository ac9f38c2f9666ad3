// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "relit/core/image.hpp"
#include "relit/core/vec.hpp"
#include "relit/envlight/envmap.hpp"
#include "relit/shading/brdf.hpp"

namespace relit::envlight {

/// Mip chain of roughness-prefiltered radiance. Level l holds the glossy
/// lobe integral of the source at roughness l / (levels - 1), over a grid
/// that halves per level starting from the source dimensions.
struct PrefilteredEnv {
    std::vector<Imagef> levels;

    int level_count() const { return int(levels.size()); }
    double roughness_of(int level) const {
        return levels.size() > 1 ? double(level) / double(levels.size() - 1) : 0.0;
    }
};

/// N x N grid over (cos_theta, roughness) in [0,1]^2 holding the two
/// hemisphere integrals of the glossy BRDF with the Fresnel term split off:
/// entry (scale, bias) reconstructs the directional albedo as
/// scale * f0 + bias. Cell centers sit at (i + 0.5) / N.
struct BrdfLut {
    int n = 0;
    std::vector<float> data;  // (row r, col c) -> data[(r * n + c) * 2 + {0,1}]

    /// Bilinear fetch, clamped to cell centers at the borders.
    Vec2<double> fetch(double cos_theta, double roughness) const;
};

/// Glossy pre-integration of the environment, one mip level per roughness
/// step. Each texel integrates the source around its own direction with
/// lobe-importance sampling under the normal = view assumption; sampling is
/// deterministic per texel for a fixed seed. Requires levels >= 2 and
/// samples_per_texel >= 32.
PrefilteredEnv prefilter_env(const EnvMap& env, int levels = 6, int samples_per_texel = 128,
                             std::uint64_t seed = 0);

/// Trilinear radiance fetch: bilinear in each neighboring mip level, linear
/// across levels by roughness.
Vec3d sample_prefiltered(const PrefilteredEnv& pre, const Vec3d& dir, double roughness);

/// Tabulates the split-off BRDF integrals on an N x N grid (N >= 16) with a
/// deterministic low-discrepancy sample set per cell.
BrdfLut precompute_brdf_lut(int n = 64, int samples = 1024);

/// Specular environment shading of one surface point:
///   reflect the view ray, fetch (scale, bias), and return
///   (scale * gain + bias) * prefiltered radiance at the reflection.
/// The per-texel intensity gain stands in for the Fresnel normal-incidence
/// reflectance here, which is what makes scale/bias applicable to it.
/// Below-horizon views return black.
Vec3d env_specular(const Vec3d& wo, const Vec3d& normal, const shading::MaterialSample<double>& mat,
                   const PrefilteredEnv& pre, const BrdfLut& lut);

/// Monte Carlo estimate of the same quantity straight from the rendering
/// integral, lobe-importance sampled; the oracle the split-sum path is
/// tested against. Uses the same Fresnel role for the gain as env_specular.
struct McEstimate {
    Vec3d value{};
    Vec3d std_error{};
};

McEstimate mc_reference(const EnvMap& env, const Vec3d& wo, const Vec3d& normal,
                        const shading::MaterialSample<double>& mat, int samples,
                        std::uint64_t seed = 1);

}  // namespace relit::envlight

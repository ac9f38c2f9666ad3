// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "relit/core/image.hpp"
#include "relit/core/vec.hpp"

namespace relit::envlight {

/// Equirectangular radiance map, linear RGB, width twice the height.
///
/// Direction convention (bit-exact contract for every lookup and writer):
/// theta is the polar angle from +z in [0, pi], phi = atan2(y, x) wrapped to
/// [0, 2pi). A texel (x, y) covers u = (x + 0.5) / W = phi / 2pi and
/// v = (y + 0.5) / H = theta / pi, so row 0 borders the +z pole and columns
/// wrap in longitude.
struct EnvMap {
    Imagef radiance;
    /// Count of texels that were negative or non-finite in the source file
    /// and were forced to zero.
    int sanitized = 0;

    int width() const { return radiance.width; }
    int height() const { return radiance.height; }
};

/// Loads a PFM or EXR file (chosen by extension) into linear radiance.
/// Throws IoError for unreadable files and InvalidInput when the image is
/// not RGB with W = 2H. Negative or non-finite texels are zeroed and
/// counted in `sanitized`.
EnvMap load_envmap(const std::string& path);

/// Writes the map back out, format chosen by extension (.pfm or .exr).
void save_envmap(const EnvMap& env, const std::string& path);

/// Wraps an existing RGB raster (tests synthesize maps directly).
EnvMap make_envmap(Imagef radiance);

/// Unit direction at the center of texel (x, y) of a W x H grid.
Vec3d texel_direction(int x, int y, int width, int height);

/// Solid angle covered by any texel in row y, exact over the texel's
/// latitude band: (2pi/W)(cos(theta_top) - cos(theta_bottom)). Rows sum
/// to 4pi.
double texel_solid_angle(int y, int width, int height);

/// Bilinear radiance lookup at a unit direction; longitude wraps, latitude
/// clamps at the poles.
Vec3d sample_equirect(const Imagef& img, const Vec3d& dir);

inline Vec3d sample_env(const EnvMap& env, const Vec3d& dir) {
    return sample_equirect(env.radiance, dir);
}

/// Solid-angle-weighted spherical-harmonics projection of the map, one
/// RGB triple per coefficient, coeff_count(degree) entries.
std::vector<Vec3d> project_env_sh(const EnvMap& env, int degree = 6);

}  // namespace relit::envlight

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>

#include "relit/core/image.hpp"

namespace relit {

inline float srgb_encode(float linear) {
    if (linear <= 0.0031308f) return 12.92f * linear;
    return 1.055f * std::pow(linear, 1.0f / 2.4f) - 0.055f;
}

inline float srgb_decode(float encoded) {
    if (encoded <= 0.04045f) return encoded / 12.92f;
    return std::pow((encoded + 0.055f) / 1.055f, 2.4f);
}

/// Reads an 8- or 16-bit PNG into [0, 1] floats (gray, RGB, or RGBA).
/// With `srgb` set, color channels pass through the sRGB decode curve;
/// alpha stays linear.
Imagef load_png(const std::string& path, bool srgb = true);

/// Writes a 1-, 3-, or 4-channel image as 8-bit PNG. With `srgb` set,
/// color channels are sRGB encoded first; values clamp to [0, 1].
void save_png(const Imagef& img, const std::string& path, bool srgb = true);

}  // namespace relit

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "relit/core/image.hpp"

namespace relit {

/// Reads an OpenEXR image. R/G/B channels map to a 3-channel image; a
/// single luminance channel maps to 1 channel. Half data widens to float.
Imagef load_exr(const std::string& path);

/// Writes a 1- or 3-channel image with full-float channels, zip compressed.
void save_exr(const Imagef& img, const std::string& path);

}  // namespace relit

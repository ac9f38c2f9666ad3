// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "relit/core/image.hpp"

namespace relit {

/// Reads a PFM ("PF" color or "Pf" grayscale) into a 3- or 1-channel image.
/// Both byte orders are handled; rows are flipped to top-down on load.
Imagef load_pfm(const std::string& path);

/// Writes a 1- or 3-channel image as little-endian PFM.
void save_pfm(const Imagef& img, const std::string& path);

}  // namespace relit

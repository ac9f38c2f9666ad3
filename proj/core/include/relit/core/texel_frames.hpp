// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "relit/core/mesh.hpp"
#include "relit/core/vec.hpp"

namespace relit {

/// Per-texel surface attachment for an S x S UV grid. Texel (i, j) samples
/// the UV point ((i + 0.5) / S, (j + 0.5) / S) and has flat index j * S + i.
/// Texels whose center falls outside every triangle are inactive and carry
/// identity frames at the origin.
struct TexelFrames {
    int res = 0;
    std::vector<std::uint8_t> active;
    std::vector<Vec3d> anchors;   // surface position at the texel center
    std::vector<Mat3d> frames;    // columns [bitangent, tangent, normal]
    std::vector<int> triangle;    // containing face, -1 when inactive
    std::vector<Vec3d> bary;      // barycentric coords in that face

    int count() const { return res * res; }
    int active_count() const;

    /// Indices of active texels in flat order.
    std::vector<int> active_indices() const;
};

/// Builds anchors and tangent frames for every texel of an S x S grid.
/// The frame's tangent follows +u, the bitangent +v (handedness preserved
/// from the UV layout), the normal interpolates vertex normals. The mesh
/// must have UVs; missing normals are computed first.
TexelFrames build_texel_frames(const TriMesh& mesh, int res);

}  // namespace relit

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "relit/core/vec.hpp"

namespace relit {

/// Triangle mesh with a single index space: every face corner references one
/// vertex carrying position, optional normal, and optional UV.
struct TriMesh {
    std::vector<Vec3d> positions;
    std::vector<Vec3d> normals;  // empty, or one per vertex
    std::vector<Vec2d> uvs;      // empty, or one per vertex
    std::vector<std::array<int, 3>> faces;

    bool has_normals() const { return !normals.empty(); }
    bool has_uvs() const { return !uvs.empty(); }
};

/// Loads a Wavefront OBJ (v, vt, vn, f). Polygon faces are triangulated as
/// fans; corners sharing the same v/vt/vn triple are merged.
TriMesh load_obj(const std::string& path);

void save_obj(const TriMesh& mesh, const std::string& path);

/// Replaces normals with area-weighted averages of incident face normals.
void compute_vertex_normals(TriMesh& mesh);

}  // namespace relit

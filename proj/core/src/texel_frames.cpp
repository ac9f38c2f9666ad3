// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/core/texel_frames.hpp"

#include <cmath>

#include "relit/errors.hpp"

namespace relit {
namespace {

// Barycentric coordinates of point p in UV triangle (a, b, c).
// Returns false when the triangle is degenerate in UV space.
bool uv_barycentric(const Vec2d& p, const Vec2d& a, const Vec2d& b, const Vec2d& c, Vec3d* out) {
    double e1x = b.x - a.x, e1y = b.y - a.y;
    double e2x = c.x - a.x, e2y = c.y - a.y;
    double det = e1x * e2y - e2x * e1y;
    if (std::abs(det) < 1e-14) return false;
    double px = p.x - a.x, py = p.y - a.y;
    double u = (px * e2y - py * e2x) / det;
    double v = (e1x * py - e1y * px) / det;
    *out = {1.0 - u - v, u, v};
    return true;
}

}  // namespace

int TexelFrames::active_count() const {
    int n = 0;
    for (std::uint8_t a : active) n += a;
    return n;
}

std::vector<int> TexelFrames::active_indices() const {
    std::vector<int> idx;
    idx.reserve(active.size());
    for (int k = 0; k < int(active.size()); ++k)
        if (active[k]) idx.push_back(k);
    return idx;
}

TexelFrames build_texel_frames(const TriMesh& mesh_in, int res) {
    if (res < 1) throw InvalidInput("build_texel_frames: res must be positive");
    if (!mesh_in.has_uvs()) throw InvalidInput("build_texel_frames: mesh has no UVs");
    TriMesh mesh = mesh_in;
    if (!mesh.has_normals()) compute_vertex_normals(mesh);

    TexelFrames tf;
    tf.res = res;
    int n = res * res;
    tf.active.assign(n, 0);
    tf.anchors.assign(n, Vec3d(0, 0, 0));
    tf.frames.assign(n, Mat3d::identity());
    tf.triangle.assign(n, -1);
    tf.bary.assign(n, Vec3d(0, 0, 0));

    // A texel belongs to the first triangle covering its UV center, so
    // overlapping charts resolve deterministically by face order.
    const double eps = 1e-9;
    for (int j = 0; j < res; ++j) {
        for (int i = 0; i < res; ++i) {
            Vec2d uv((i + 0.5) / double(res), (j + 0.5) / double(res));
            int k = j * res + i;
            for (int f = 0; f < int(mesh.faces.size()); ++f) {
                const auto& face = mesh.faces[f];
                Vec3d bc;
                if (!uv_barycentric(uv, mesh.uvs[face[0]], mesh.uvs[face[1]], mesh.uvs[face[2]],
                                    &bc))
                    continue;
                if (bc.x < -eps || bc.y < -eps || bc.z < -eps) continue;
                tf.active[k] = 1;
                tf.triangle[k] = f;
                tf.bary[k] = bc;
                break;
            }
        }
    }

    for (int k = 0; k < n; ++k) {
        if (!tf.active[k]) continue;
        const auto& face = mesh.faces[tf.triangle[k]];
        const Vec3d bc = tf.bary[k];
        const Vec3d p0 = mesh.positions[face[0]];
        const Vec3d p1 = mesh.positions[face[1]];
        const Vec3d p2 = mesh.positions[face[2]];
        tf.anchors[k] = p0 * bc.x + p1 * bc.y + p2 * bc.z;

        Vec3d nrm = mesh.normals[face[0]] * bc.x + mesh.normals[face[1]] * bc.y +
                    mesh.normals[face[2]] * bc.z;
        double nlen = length(nrm);
        if (nlen < 1e-12) {
            nrm = cross(p1 - p0, p2 - p0);
            nlen = length(nrm);
            if (nlen < 1e-12) throw InvalidInput("build_texel_frames: degenerate face");
        }
        nrm = nrm / nlen;

        // Tangent from the UV parameterization: the surface direction along
        // which u grows at constant v.
        const Vec2d& w0 = mesh.uvs[face[0]];
        const Vec2d& w1 = mesh.uvs[face[1]];
        const Vec2d& w2 = mesh.uvs[face[2]];
        double du1 = w1.x - w0.x, dv1 = w1.y - w0.y;
        double du2 = w2.x - w0.x, dv2 = w2.y - w0.y;
        double det = du1 * dv2 - du2 * dv1;
        Vec3d e1 = p1 - p0, e2 = p2 - p0;
        Vec3d tan, bit;
        if (std::abs(det) > 1e-14) {
            tan = (e1 * dv2 - e2 * dv1) * (1.0 / det);
            bit = (e2 * du1 - e1 * du2) * (1.0 / det);
        } else {
            tan = e1;
            bit = e2;
        }
        tan = tan - nrm * dot(nrm, tan);
        double tlen = length(tan);
        if (tlen < 1e-12) {
            // UV gradient collapsed onto the normal; any perpendicular works.
            Vec3d seed = std::abs(nrm.x) < 0.9 ? Vec3d(1, 0, 0) : Vec3d(0, 1, 0);
            tan = seed - nrm * dot(nrm, seed);
            tlen = length(tan);
        }
        tan = tan / tlen;
        Vec3d ortho_bit = cross(nrm, tan);
        if (dot(ortho_bit, bit) < 0) ortho_bit = -ortho_bit;
        tf.frames[k] = Mat3d(ortho_bit, tan, nrm);
    }
    return tf;
}

}  // namespace relit

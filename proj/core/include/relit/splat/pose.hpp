// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "relit/core/texel_frames.hpp"
#include "relit/core/vec.hpp"
#include "relit/errors.hpp"
#include "relit/splat/gaussian.hpp"
#include "relit/splat/types.hpp"

namespace relit::splat {

/// World-space mean of one primitive: surface anchor plus the frame-local
/// static offset plus the decoded dynamic offset.
inline Vec3d pose_mean(const Vec3d& anchor, const Mat3d& frame, const Vec3d& mu_local,
                       const Vec3d& delta_mu) {
    return anchor + frame * mu_local + delta_mu;
}

/// World-space covariance from the decoded rotation and scale, oriented by
/// the texel frame: Sigma = (F Rq) diag(s)^2 (F Rq)^T.
inline Mat3d pose_covariance(const Mat3d& frame, const Quatd& rotation, const Vec3d& scale) {
    Mat3d rot = frame * rotation.to_matrix();
    Mat3d m = rot * Mat3d::diag(scale);
    return m * m.transposed();
}

/// Offset mesh normal, renormalized; a vanishing sum falls back to the mesh
/// normal so the result is always a direction.
inline Vec3d shading_normal(const Vec3d& mesh_normal, const Vec3d& delta_n) {
    Vec3d n = mesh_normal + delta_n;
    double len = length(n);
    if (len < 1e-9) return mesh_normal;
    return n / len;
}

/// Poses one primitive on its texel frame. Shading inputs (color, normal)
/// keep their defaults; callers fill them from the material pipeline.
inline PosedGaussian<double> pose_primitive(const TexelFrames& frames, const GaussianPrimitive& g) {
    if (g.texel < 0 || g.texel >= frames.count() || !frames.active[g.texel])
        throw InvalidInput("pose_primitive: texel " + std::to_string(g.texel) +
                           " is not an active frame");
    PosedGaussian<double> out;
    out.mean = pose_mean(frames.anchors[g.texel], frames.frames[g.texel], g.mu_local, g.delta_mu);
    out.cov = pose_covariance(frames.frames[g.texel], g.rotation, g.scale);
    out.opacity = g.opacity;
    out.normal = frames.frames[g.texel].col(2);
    return out;
}

inline std::vector<PosedGaussian<double>> pose_primitives(const TexelFrames& frames,
                                                          const std::vector<GaussianPrimitive>& gs) {
    std::vector<PosedGaussian<double>> out;
    out.reserve(gs.size());
    for (const GaussianPrimitive& g : gs) out.push_back(pose_primitive(frames, g));
    return out;
}

}  // namespace relit::splat

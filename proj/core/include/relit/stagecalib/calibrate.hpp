// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "relit/core/camera.hpp"
#include "relit/core/vec.hpp"

namespace relit::stagecalib {

/// Mirror sphere placed in the capture volume. Shape is known from
/// measurement; `reflectance` scales highlight magnitudes when solving for
/// emitter intensity.
struct SphereSpec {
    Vec3d center{};
    double radius = 0.1;
    double reflectance = 1.0;
};

/// One sighting of a specular highlight: which camera saw it and where.
/// Highlight localization happens upstream; this module is purely geometric.
struct HighlightObs {
    int camera = 0;
    Vec2<double> pixel{};
};

struct RejectedObs {
    int observation = 0;
    std::string reason;
};

struct LightCalibration {
    Vec3d position{};
    /// Root-mean-square distance from the solved point to the reflected
    /// rays, in scene units.
    double residual = 0;
    int used = 0;
    std::vector<RejectedObs> rejected;
};

/// Recovers an emitter position from mirror-sphere highlights: each pixel
/// ray is intersected with the sphere, reflected about the surface normal,
/// and the emitter is the least-squares closest point to the reflected
/// rays. Observations whose rays miss the sphere are dropped and reported
/// in `rejected`. Throws InvalidInput when fewer than two usable
/// observations from distinct cameras remain, or when the reflected rays
/// are parallel and the point is under-constrained.
LightCalibration calibrate_light(const std::vector<HighlightObs>& obs,
                                 const std::vector<Camera<double>>& cams,
                                 const SphereSpec& sphere);

/// Per-emitter RGB intensity from highlight magnitudes: the least-squares
/// scalar fit of measured = reflectance * intensity over the sightings,
/// which reduces to the mean divided by the reflectance.
Vec3d calibrate_intensity(const std::vector<Vec3d>& highlight_rgb, double reflectance);

/// Paired patch readings in linear RGB. References must be strictly
/// positive; at least four patches are needed for a stable solve.
struct ColorChart {
    std::vector<Vec3d> measured;
    std::vector<Vec3d> reference;
};

struct ColorCalibration {
    Mat3d matrix;
    /// Zero unless solved in affine mode.
    Vec3d offset{};
    /// Root-mean-square per-channel residual of matrix * measured (+ offset)
    /// against the references.
    double residual = 0;
    bool affine = false;
};

/// Least-squares color correction M minimizing sum |M m_i (+ o) - ref_i|^2,
/// applied as a left-multiplication on linear RGB. With `affine` set the
/// solve includes a constant offset column. Throws InvalidInput on size
/// mismatches, fewer than four patches, non-positive references, or a
/// rank-deficient set of measurements.
ColorCalibration calibrate_color(const ColorChart& chart, bool affine = false);

enum class FrameRole { olat, tracking };

/// Role of one frame plus, for head-pose interpolation, its nearest
/// tracking frames and linear weights. A tracking frame points at itself
/// with full weight. An olat frame outside the span of tracking frames
/// clamps to the single available neighbor; the unused slot stays -1 with
/// weight zero. If the sequence has no tracking frame at all, both slots
/// stay -1.
struct FrameInterp {
    FrameRole role = FrameRole::olat;
    int prev = -1;
    int next = -1;
    double w_prev = 0;
    double w_next = 0;
};

/// Splits an interleaved capture into lighting and tracking frames: frame i
/// is a tracking frame exactly when i mod period == tracking_slot. Throws
/// InvalidInput for count < 1, period < 2, or a slot outside [0, period).
std::vector<FrameInterp> demux_interleaved(int count, int period = 3, int tracking_slot = 2);

}  // namespace relit::stagecalib

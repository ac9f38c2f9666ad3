// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "relit/core/camera.hpp"
#include "relit/core/vec.hpp"
#include "relit/stagecalib/calibrate.hpp"

namespace relit::stagecalib {

/// Length of a head-pose coefficient vector attached to a frame.
inline constexpr int kExpressionDim = 109;

struct StageCamera {
    std::string id;
    Camera<double> camera;
    /// Sensor-to-reference color correction, left-multiplied on linear RGB.
    Mat3d color_matrix;
};

struct StageLight {
    std::string id;
    Vec3d position{};
    Vec3d intensity{1, 1, 1};
};

struct StageFrame {
    int index = 0;
    FrameRole role = FrameRole::olat;
    /// Id of the active emitter; meaningful only for lighting frames.
    std::string light;
    std::string image;
    std::string matte;
    /// Either a path to a float32 blob or inline coefficients; at most one
    /// of the two is set.
    std::string expression_path;
    std::vector<float> expression;
};

/// Dataset-facing description of one capture: calibrated cameras and
/// emitters plus the interleaved frame list. Serialized as JSON with a
/// versioned schema.
struct StageManifest {
    int schema_version = 1;
    int period = 3;
    int tracking_slot = 2;
    std::vector<StageCamera> cameras;
    std::vector<StageLight> lights;
    std::vector<StageFrame> frames;
};

/// Reads a manifest. Throws IoError when the file cannot be read and
/// InvalidInput when it does not parse as the expected JSON shape.
StageManifest load_manifest(const std::string& path);

void save_manifest(const StageManifest& manifest, const std::string& path);

/// Checks the semantic invariants of a parsed manifest and returns one
/// message per violation; an empty list means the manifest is usable.
std::vector<std::string> validate_manifest(const StageManifest& manifest);

/// Little-endian float32 coefficient blobs. Loading validates that the
/// byte count is a multiple of four; the expected length is checked by the
/// caller, not here.
std::vector<float> load_expression_blob(const std::string& path);
void save_expression_blob(const std::vector<float>& values, const std::string& path);

}  // namespace relit::stagecalib

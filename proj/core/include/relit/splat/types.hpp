// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "relit/core/image.hpp"
#include "relit/core/vec.hpp"

namespace relit::splat {

/// World-space primitive ready for projection: mean, full covariance, and
/// the shaded color carried to the compositor.
template <typename T>
struct PosedGaussian {
    Vec3<T> mean{};
    Mat3<T> cov = Mat3<T>::identity();
    T opacity = T(0);
    Vec3<T> color{};
    Vec3<T> normal{0, 0, 1};
};

using PosedGaussianf = PosedGaussian<float>;
using PosedGaussiand = PosedGaussian<double>;

/// Composited output: linear RGB plus coverage, black background.
template <typename T>
struct RenderTarget {
    Image<T> color;
    Image<T> alpha;
    int skipped = 0;

    RenderTarget() = default;
    RenderTarget(int width, int height)
        : color(width, height, 3), alpha(width, height, 1) {}
};

using RenderTargetf = RenderTarget<float>;
using RenderTargetd = RenderTarget<double>;

}  // namespace relit::splat

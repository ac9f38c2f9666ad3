// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "relit/core/image.hpp"
#include "relit/errors.hpp"
#include "relit/neural/autodiff.hpp"
#include "relit/neural/ops.hpp"

namespace relit::fit {

/// Primitive extents outside this range are penalized by the scale hinge.
inline constexpr double kScaleHingeMin = 1e-3;
inline constexpr double kScaleHingeMax = 5e-2;

/// Training weights and run shape. The loss weights are load-bearing
/// defaults; the remaining fields size the run and the networks.
struct TrainConfig {
    double lambda_l1 = 1.0;
    double lambda_ssim = 0.2;
    double lambda_alpha = 2e-2;
    double lambda_scale = 2e-2;
    double lambda_pos = 1e-5;
    double lambda_normal_start = 1.0;
    /// The normal penalty reaches zero at this fraction of the run.
    double normal_decay_end = 0.8;

    int iterations = 5000;
    int batch_size = 4;
    std::uint64_t seed = 1;
    int texture_res = 32;

    // Network sizing.
    int expr_features = 8;
    int geom_base_res = 8;
    int geom_base_channels = 24;
    int diffuse_hidden = 32;
    int view_hidden = 8;

    // Optimizer and bookkeeping.
    double learning_rate = 2e-3;
    int holdout_interval = 250;
    int checkpoint_interval = 1000;

    /// Throws InvalidInput when a weight is negative or the run shape is
    /// impossible. Zero iterations are allowed: such a run only emits its
    /// initialization.
    void validate() const;
};

/// One training step's scalar loss values. `total` is the weighted sum of
/// the six terms exactly.
struct LossBreakdown {
    double l1 = 0;
    double ssim = 0;
    double normal = 0;
    double alpha = 0;
    double scale = 0;
    double pos = 0;
    double total = 0;
};

/// Weight of the normal-offset penalty at `iter`: a linear ramp from the
/// configured start down to zero at normal_decay_end * iterations.
double lambda_normal_schedule(int iter, const TrainConfig& cfg);

/// The normalized 11x11 Gaussian window (sigma 1.5) used by the SSIM terms.
const std::vector<double>& ssim_window();

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// Mean absolute difference between an [C, H, W] activation and a target of
/// the same shape.
template <typename T>
Var<T> l1_graph(Tape<T>& t, Var<T> image, Var<T> target) {
    if (t.shape(image) != t.shape(target))
        throw InvalidInput("l1_graph: image and target shapes differ");
    return mean(t, abs_val(t, sub(t, image, target)));
}

/// Mean structural similarity between two [C, H, W] images over valid 11x11
/// Gaussian windows, stabilizers C1 = 0.01^2 and C2 = 0.03^2 on a unit
/// dynamic range. Channels are scored independently and averaged.
template <typename T>
Var<T> ssim_graph(Tape<T>& t, Var<T> image, Var<T> target) {
    const Shape& s = t.shape(image);
    if (s.ndim != 3 || t.shape(target) != s)
        throw InvalidInput("ssim_graph: expects matching [C, H, W] images");
    if (s[1] < kSsimWindow || s[2] < kSsimWindow)
        throw InvalidInput("ssim_graph: image smaller than the 11x11 window");
    std::vector<T> window(ssim_window().begin(), ssim_window().end());

    Var<T> mu_x = depthwise_valid(t, image, window, kSsimWindow);
    Var<T> mu_y = depthwise_valid(t, target, window, kSsimWindow);
    Var<T> xx = depthwise_valid(t, mul(t, image, image), window, kSsimWindow);
    Var<T> yy = depthwise_valid(t, mul(t, target, target), window, kSsimWindow);
    Var<T> xy = depthwise_valid(t, mul(t, image, target), window, kSsimWindow);

    Var<T> mu_xy = mul(t, mu_x, mu_y);
    Var<T> var_x = sub(t, xx, mul(t, mu_x, mu_x));
    Var<T> var_y = sub(t, yy, mul(t, mu_y, mu_y));
    Var<T> cov = sub(t, xy, mu_xy);

    Var<T> num = mul(t, add_const(t, mul_const(t, mu_xy, T(2)), T(kSsimC1)),
                     add_const(t, mul_const(t, cov, T(2)), T(kSsimC2)));
    Var<T> den = mul(t, add_const(t, add(t, mul(t, mu_x, mu_x), mul(t, mu_y, mu_y)), T(kSsimC1)),
                     add_const(t, add(t, var_x, var_y), T(kSsimC2)));
    return mean(t, div(t, num, den));
}

/// lambda_l1 * L1 + lambda_ssim * (1 - SSIM).
template <typename T>
Var<T> photometric_graph(Tape<T>& t, Var<T> image, Var<T> target, const TrainConfig& cfg) {
    Var<T> l1 = mul_const(t, l1_graph(t, image, target), T(cfg.lambda_l1));
    Var<T> dssim = mul_const(t, add_const(t, mul_const(t, ssim_graph(t, image, target), T(-1)),
                                          T(1)),
                             T(cfg.lambda_ssim));
    return add(t, l1, dssim);
}

/// The four regularizer terms as separate graph scalars, each already
/// multiplied by its weight.
template <typename T>
struct RegularizerGraph {
    Var<T> normal;
    Var<T> alpha;
    Var<T> scale;
    Var<T> pos;
};

/// `delta_n` and `delta_mu` are [N, 3] decoded offsets, `scales` [N, 3]
/// decoded extents, `alpha` the rendered [1, H, W] coverage against a matte
/// of the same shape. The normal term follows the decay schedule at `iter`.
template <typename T>
RegularizerGraph<T> regularizer_graph(Tape<T>& t, Var<T> delta_n, Var<T> alpha, Var<T> matte,
                                      Var<T> scales, Var<T> delta_mu, const TrainConfig& cfg,
                                      int iter) {
    if (t.shape(alpha) != t.shape(matte))
        throw InvalidInput("regularizer_graph: alpha and matte shapes differ");
    RegularizerGraph<T> out;
    out.normal = mul_const(t, mean(t, row_norm(t, delta_n, T(1e-8))),
                           T(lambda_normal_schedule(iter, cfg)));
    out.alpha = mul_const(t, mean(t, square(t, sub(t, alpha, matte))), T(cfg.lambda_alpha));
    Var<T> over = relu(t, add_const(t, scales, T(-kScaleHingeMax)));
    Var<T> under = relu(t, add_const(t, mul_const(t, scales, T(-1)), T(kScaleHingeMin)));
    out.scale = mul_const(t, mean(t, add(t, over, under)), T(cfg.lambda_scale));
    out.pos = mul_const(t, mean(t, row_dot(t, delta_mu, delta_mu)), T(cfg.lambda_pos));
    return out;
}

/// Photometric loss of two plain images, for callers outside a training
/// graph. Throws InvalidInput on shape mismatch.
double loss_photometric(const Imaged& rendered, const Imaged& target, const TrainConfig& cfg);

/// Mean SSIM of two plain images.
double ssim_index(const Imaged& a, const Imaged& b);

}  // namespace relit::fit

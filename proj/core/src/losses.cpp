// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/fit/losses.hpp"

#include <algorithm>
#include <cmath>

namespace relit::fit {

void TrainConfig::validate() const {
    if (lambda_l1 < 0 || lambda_ssim < 0 || lambda_alpha < 0 || lambda_scale < 0 ||
        lambda_pos < 0 || lambda_normal_start < 0)
        throw InvalidInput("TrainConfig: loss weights must be non-negative");
    if (normal_decay_end <= 0 || normal_decay_end > 1)
        throw InvalidInput("TrainConfig: normal_decay_end must be in (0, 1]");
    if (iterations < 0) throw InvalidInput("TrainConfig: iterations must be non-negative");
    if (batch_size < 1) throw InvalidInput("TrainConfig: batch_size must be positive");
    if (texture_res < 1) throw InvalidInput("TrainConfig: texture_res must be positive");
    if (expr_features < 1 || geom_base_res < 1 || geom_base_channels < 1 ||
        diffuse_hidden < 1 || view_hidden < 1)
        throw InvalidInput("TrainConfig: network sizes must be positive");
    if (learning_rate <= 0) throw InvalidInput("TrainConfig: learning_rate must be positive");
    if (holdout_interval < 1 || checkpoint_interval < 1)
        throw InvalidInput("TrainConfig: reporting intervals must be positive");
}

double lambda_normal_schedule(int iter, const TrainConfig& cfg) {
    double end = cfg.normal_decay_end * double(cfg.iterations);
    if (end <= 0) return 0.0;
    double ramp = std::max(0.0, 1.0 - double(iter) / end);
    return cfg.lambda_normal_start * ramp;
}

const std::vector<double>& ssim_window() {
    static const std::vector<double> window = [] {
        const double sigma = 1.5;
        std::vector<double> w(std::size_t(kSsimWindow) * kSsimWindow);
        double sum = 0.0;
        for (int y = 0; y < kSsimWindow; ++y) {
            for (int x = 0; x < kSsimWindow; ++x) {
                double dx = x - (kSsimWindow - 1) / 2.0;
                double dy = y - (kSsimWindow - 1) / 2.0;
                double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                w[std::size_t(y) * kSsimWindow + x] = v;
                sum += v;
            }
        }
        for (double& v : w) v /= sum;
        return w;
    }();
    return window;
}

namespace {

Var<double> image_constant(Tape<double>& t, const Imaged& img) {
    // Planar [C, H, W] copy of the interleaved raster.
    Shape s{img.channels, img.height, img.width};
    std::vector<double> planar(std::size_t(img.channels) * img.pixel_count());
    for (int c = 0; c < img.channels; ++c)
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                planar[(std::size_t(c) * img.height + y) * img.width + x] = img.at(x, y, c);
    return t.constant(s, planar.data());
}

}  // namespace

double loss_photometric(const Imaged& rendered, const Imaged& target, const TrainConfig& cfg) {
    if (!rendered.same_shape(target))
        throw InvalidInput("loss_photometric: image shapes differ");
    Tape<double> t;
    Var<double> loss =
        photometric_graph(t, image_constant(t, rendered), image_constant(t, target), cfg);
    return t.vals(loss)[0];
}

double ssim_index(const Imaged& a, const Imaged& b) {
    if (!a.same_shape(b)) throw InvalidInput("ssim_index: image shapes differ");
    Tape<double> t;
    Var<double> s = ssim_graph(t, image_constant(t, a), image_constant(t, b));
    return t.vals(s)[0];
}

}  // namespace relit::fit

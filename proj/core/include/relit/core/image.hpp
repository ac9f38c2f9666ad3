// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "relit/errors.hpp"

namespace relit {

/// Row-major raster with interleaved channels. Pixel (0, 0) is the top-left
/// corner; x grows right, y grows down.
template <typename T>
struct Image {
    int width = 0, height = 0, channels = 0;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, int c, T fill = T(0)) : width(w), height(h), channels(c) {
        if (w < 0 || h < 0 || c < 1) throw InvalidInput("Image: bad dimensions");
        data.assign(std::size_t(w) * h * c, fill);
    }

    T& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * channels + c]; }
    T at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * channels + c]; }

    std::size_t pixel_count() const { return std::size_t(width) * height; }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

using Imagef = Image<float>;
using Imaged = Image<double>;

template <typename T>
inline double mean_abs_diff(const Image<T>& a, const Image<T>& b) {
    if (!a.same_shape(b)) throw InvalidInput("mean_abs_diff: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) sum += std::abs(double(a.data[i]) - double(b.data[i]));
    return sum / double(a.data.size());
}

template <typename T>
inline double max_abs_diff(const Image<T>& a, const Image<T>& b) {
    if (!a.same_shape(b)) throw InvalidInput("max_abs_diff: shape mismatch");
    double peak = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        peak = std::max(peak, std::abs(double(a.data[i]) - double(b.data[i])));
    return peak;
}

/// PSNR in dB against a unit peak signal.
template <typename T>
inline double psnr(const Image<T>& a, const Image<T>& b) {
    if (!a.same_shape(b)) throw InvalidInput("psnr: shape mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = double(a.data[i]) - double(b.data[i]);
        mse += d * d;
    }
    mse /= double(a.data.size());
    if (mse <= 0.0) return 1e9;
    return -10.0 * std::log10(mse);
}

template <typename To, typename From>
inline Image<To> image_cast(const Image<From>& src) {
    Image<To> out(src.width, src.height, src.channels);
    for (std::size_t i = 0; i < src.data.size(); ++i) out.data[i] = To(src.data[i]);
    return out;
}

}  // namespace relit

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/envlight/envmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relit/core/sh.hpp"
#include "relit/errors.hpp"
#include "relit/io/exr.hpp"
#include "relit/io/pfm.hpp"

namespace relit::envlight {

namespace {

constexpr double kPi = std::numbers::pi;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

EnvMap make_envmap(Imagef radiance) {
    if (radiance.channels != 3)
        throw InvalidInput("make_envmap: expected 3 channels, got " +
                           std::to_string(radiance.channels));
    if (radiance.width != 2 * radiance.height || radiance.height < 1)
        throw InvalidInput("make_envmap: expected W = 2H, got " +
                           std::to_string(radiance.width) + "x" + std::to_string(radiance.height));
    EnvMap env;
    env.radiance = std::move(radiance);
    for (float& v : env.radiance.data) {
        if (!(v >= 0.0f) || !std::isfinite(v)) {
            v = 0.0f;
            ++env.sanitized;
        }
    }
    return env;
}

EnvMap load_envmap(const std::string& path) {
    Imagef img;
    if (ends_with(path, ".pfm"))
        img = load_pfm(path);
    else if (ends_with(path, ".exr"))
        img = load_exr(path);
    else
        throw IoError("load_envmap: unsupported extension on " + path);
    if (img.channels == 1) {
        Imagef rgb(img.width, img.height, 3);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = img.at(x, y, 0);
        img = std::move(rgb);
    }
    return make_envmap(std::move(img));
}

void save_envmap(const EnvMap& env, const std::string& path) {
    if (ends_with(path, ".pfm"))
        save_pfm(env.radiance, path);
    else if (ends_with(path, ".exr"))
        save_exr(env.radiance, path);
    else
        throw IoError("save_envmap: unsupported extension on " + path);
}

Vec3d texel_direction(int x, int y, int width, int height) {
    double theta = (double(y) + 0.5) / double(height) * kPi;
    double phi = (double(x) + 0.5) / double(width) * 2.0 * kPi;
    double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

double texel_solid_angle(int y, int width, int height) {
    double theta0 = double(y) / double(height) * kPi;
    double theta1 = (double(y) + 1.0) / double(height) * kPi;
    return (2.0 * kPi / double(width)) * (std::cos(theta0) - std::cos(theta1));
}

Vec3d sample_equirect(const Imagef& img, const Vec3d& dir) {
    double z = std::clamp(dir.z, -1.0, 1.0);
    double theta = std::acos(z);
    double phi = std::atan2(dir.y, dir.x);
    if (phi < 0) phi += 2.0 * kPi;
    double u = phi / (2.0 * kPi);
    double v = theta / kPi;

    double fx = u * img.width - 0.5;
    double fy = v * img.height - 0.5;
    int x0 = int(std::floor(fx));
    int y0 = int(std::floor(fy));
    double tx = fx - x0;
    double ty = fy - y0;

    auto wrap_x = [&](int x) {
        int w = img.width;
        return ((x % w) + w) % w;
    };
    auto clamp_y = [&](int y) { return std::clamp(y, 0, img.height - 1); };

    int x1 = x0 + 1, y1 = y0 + 1;
    int xa = wrap_x(x0), xb = wrap_x(x1);
    int ya = clamp_y(y0), yb = clamp_y(y1);

    Vec3d out{};
    for (int c = 0; c < 3; ++c) {
        double top = (1.0 - tx) * img.at(xa, ya, c) + tx * img.at(xb, ya, c);
        double bot = (1.0 - tx) * img.at(xa, yb, c) + tx * img.at(xb, yb, c);
        out[c] = (1.0 - ty) * top + ty * bot;
    }
    return out;
}

std::vector<Vec3d> project_env_sh(const EnvMap& env, int degree) {
    const int w = env.width(), h = env.height();
    const int count = sh::coeff_count(degree);
    std::vector<Vec3d> coeffs(static_cast<std::size_t>(count));
    std::vector<double> basis(static_cast<std::size_t>(count));
    for (int y = 0; y < h; ++y) {
        double dw = texel_solid_angle(y, w, h);
        for (int x = 0; x < w; ++x) {
            sh::eval(degree, texel_direction(x, y, w, h), basis.data());
            Vec3d radiance{env.radiance.at(x, y, 0), env.radiance.at(x, y, 1),
                           env.radiance.at(x, y, 2)};
            Vec3d weighted = radiance * dw;
            for (int i = 0; i < count; ++i) coeffs[std::size_t(i)] += weighted * basis[std::size_t(i)];
        }
    }
    return coeffs;
}

}  // namespace relit::envlight

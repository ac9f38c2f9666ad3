// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "relit/core/camera.hpp"
#include "relit/parallel.hpp"
#include "relit/splat/project.hpp"
#include "relit/splat/types.hpp"

namespace relit::splat {

struct RasterizeOptions {
    int tile = 16;
    /// Contributions below this opacity are dropped; doubles as the cutoff
    /// that bounds each splat's pixel footprint.
    double alpha_floor = 1e-8;
    double opacity_clamp = 0.999;
    /// Compositing stops once transmittance falls below this.
    double stop_transmittance = 1e-8;
};

namespace detail {

/// Splat resolved to screen space with inverse covariance and a radius
/// outside which its contribution is guaranteed under the alpha floor.
template <typename T>
struct ScreenSplat {
    Vec2<T> mean{};
    T qa = 0, qb = 0, qc = 0;
    T depth = 0;
    T opacity = 0;
    Vec3<T> color{};
    T radius = 0;
    int index = 0;
};

template <typename T>
bool finite_gaussian(const PosedGaussian<T>& g) {
    for (int c = 0; c < 3; ++c) {
        if (!std::isfinite(g.mean[c]) || !std::isfinite(g.color[c])) return false;
        for (int r = 0; r < 3; ++r)
            if (!std::isfinite(g.cov(r, c))) return false;
    }
    return std::isfinite(g.opacity);
}

/// Projects and inverts one splat. Returns false for culled or degenerate
/// splats; `skipped` counts only non-finite inputs.
template <typename T>
bool prepare_splat(const PosedGaussian<T>& g, const Camera<T>& cam, const RasterizeOptions& opt,
                   int index, ScreenSplat<T>* out, int* skipped) {
    if (!finite_gaussian(g)) {
        ++*skipped;
        return false;
    }
    ProjectedSplat<T> proj;
    if (!project_ewa(g, cam, &proj)) return false;
    T det = proj.cov_a * proj.cov_c - proj.cov_b * proj.cov_b;
    if (!(det > T(1e-12)) || proj.cov_a <= T(0) || proj.cov_c <= T(0)) return false;
    T opacity = std::min(g.opacity, T(opt.opacity_clamp));
    if (opacity <= T(opt.alpha_floor)) return false;

    out->mean = proj.mean;
    T inv_det = T(1) / det;
    out->qa = proj.cov_c * inv_det;
    out->qb = -proj.cov_b * inv_det;
    out->qc = proj.cov_a * inv_det;
    out->depth = proj.depth;
    out->opacity = opacity;
    out->color = g.color;
    // Largest eigenvalue of the 2x2 covariance bounds the footprint.
    T mid = T(0.5) * (proj.cov_a + proj.cov_c);
    T disc = std::sqrt(std::max(T(0), mid * mid - det));
    T lambda_max = mid + disc;
    out->radius = std::sqrt(T(2) * std::log(opacity / T(opt.alpha_floor)) * lambda_max) + T(1);
    out->index = index;
    return true;
}

template <typename T>
std::vector<ScreenSplat<T>> prepare_splats(const std::vector<PosedGaussian<T>>& gs,
                                           const Camera<T>& cam, const RasterizeOptions& opt,
                                           int* skipped) {
    std::vector<ScreenSplat<T>> out;
    out.reserve(gs.size());
    ScreenSplat<T> s;
    for (int i = 0; i < int(gs.size()); ++i)
        if (prepare_splat(gs[i], cam, opt, i, &s, skipped)) out.push_back(s);
    return out;
}

template <typename T>
void sort_by_depth(std::vector<ScreenSplat<T>>& splats) {
    std::sort(splats.begin(), splats.end(), [](const ScreenSplat<T>& a, const ScreenSplat<T>& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.index < b.index;
    });
}

/// Front-to-back compositing of one pixel. `splats` must be depth-sorted;
/// entries whose contribution falls under the floor are passed over, so a
/// caller-side footprint cutoff never changes the result.
template <typename T>
void composite_pixel(const std::vector<const ScreenSplat<T>*>& splats, T px, T py,
                     const RasterizeOptions& opt, T* rgb, T* alpha) {
    T transmittance = T(1);
    Vec3<T> color{};
    for (const ScreenSplat<T>* s : splats) {
        T dx = px - s->mean.x, dy = py - s->mean.y;
        T power = T(-0.5) * (s->qa * dx * dx + T(2) * s->qb * dx * dy + s->qc * dy * dy);
        if (power > T(0)) power = T(0);
        T a = s->opacity * std::exp(power);
        if (a > T(opt.opacity_clamp)) a = T(opt.opacity_clamp);
        if (a < T(opt.alpha_floor)) continue;
        color += s->color * (transmittance * a);
        transmittance *= T(1) - a;
        if (transmittance < T(opt.stop_transmittance)) break;
    }
    rgb[0] = color.x;
    rgb[1] = color.y;
    rgb[2] = color.z;
    *alpha = T(1) - transmittance;
}

/// Bins depth-sorted splats into the screen tiles their footprint radius
/// touches. Bucket order preserves the sort, so per-pixel walks over a
/// bucket composite in the same order as a walk over the full list.
template <typename T>
std::vector<std::vector<const ScreenSplat<T>*>> tile_buckets(
    const std::vector<ScreenSplat<T>>& splats, int width, int height, const RasterizeOptions& opt,
    int* tiles_x_out, int* tiles_y_out) {
    const int tile = opt.tile;
    const int tiles_x = (width + tile - 1) / tile;
    const int tiles_y = (height + tile - 1) / tile;
    *tiles_x_out = tiles_x;
    *tiles_y_out = tiles_y;
    std::vector<std::vector<const ScreenSplat<T>*>> buckets(std::size_t(tiles_x) * tiles_y);
    for (const auto& s : splats) {
        int x0 = std::max(0, int(std::floor((s.mean.x - s.radius) / tile)));
        int x1 = std::min(tiles_x - 1, int(std::floor((s.mean.x + s.radius) / tile)));
        int y0 = std::max(0, int(std::floor((s.mean.y - s.radius) / tile)));
        int y1 = std::min(tiles_y - 1, int(std::floor((s.mean.y + s.radius) / tile)));
        for (int ty = y0; ty <= y1; ++ty)
            for (int tx = x0; tx <= x1; ++tx) buckets[std::size_t(ty) * tiles_x + tx].push_back(&s);
    }
    return buckets;
}

}  // namespace detail

/// Tile-based splatting. Tiles run in parallel and own disjoint pixels, so
/// the image is bitwise-identical to a serial pass.
template <typename T>
RenderTarget<T> rasterize(const std::vector<PosedGaussian<T>>& gs, const Camera<T>& cam,
                          const RasterizeOptions& opt = {}) {
    RenderTarget<T> target(cam.width, cam.height);
    auto splats = detail::prepare_splats(gs, cam, opt, &target.skipped);
    detail::sort_by_depth(splats);

    const int tile = opt.tile;
    int tiles_x = 0, tiles_y = 0;
    auto buckets = detail::tile_buckets(splats, cam.width, cam.height, opt, &tiles_x, &tiles_y);

    parallel_for(std::int64_t(tiles_x) * tiles_y, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t t = lo; t < hi; ++t) {
            int tx = int(t % tiles_x), ty = int(t / tiles_x);
            const auto& bucket = buckets[std::size_t(t)];
            int px1 = std::min(cam.width, (tx + 1) * tile);
            int py1 = std::min(cam.height, (ty + 1) * tile);
            for (int y = ty * tile; y < py1; ++y)
                for (int x = tx * tile; x < px1; ++x)
                    detail::composite_pixel(bucket, T(x) + T(0.5), T(y) + T(0.5), opt,
                                            &target.color.at(x, y, 0), &target.alpha.at(x, y, 0));
        }
    });
    return target;
}

/// Exhaustive per-pixel pass over every splat, no tiling or footprint
/// culling. Slow; used to pin down the tiled path.
template <typename T>
RenderTarget<T> rasterize_reference(const std::vector<PosedGaussian<T>>& gs, const Camera<T>& cam,
                                    const RasterizeOptions& opt = {}) {
    RenderTarget<T> target(cam.width, cam.height);
    auto splats = detail::prepare_splats(gs, cam, opt, &target.skipped);
    detail::sort_by_depth(splats);
    std::vector<const detail::ScreenSplat<T>*> all;
    all.reserve(splats.size());
    for (const auto& s : splats) all.push_back(&s);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x)
            detail::composite_pixel(all, T(x) + T(0.5), T(y) + T(0.5), opt,
                                    &target.color.at(x, y, 0), &target.alpha.at(x, y, 0));
    return target;
}

}  // namespace relit::splat

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "relit/core/camera.hpp"
#include "relit/core/quat.hpp"
#include "relit/core/vec.hpp"
#include "relit/errors.hpp"
#include "relit/neural/autodiff.hpp"
#include "relit/splat/rasterize.hpp"
#include "relit/splat/types.hpp"

namespace relit::splat {

namespace detail {

/// Assembles world-space primitives from flat per-row buffers. The rotation
/// rows are used as-is by the quaternion-to-matrix formula; callers that
/// optimize them are expected to normalize upstream.
template <typename T>
std::vector<PosedGaussian<T>> pose_rows(const std::vector<T>& mean, const std::vector<T>& quat,
                                        const std::vector<T>& scale, const std::vector<T>& opacity,
                                        const std::vector<T>& color,
                                        const std::vector<Mat3<T>>& frames) {
    const int n = int(frames.size());
    std::vector<PosedGaussian<T>> out(frames.size());
    for (int i = 0; i < n; ++i) {
        PosedGaussian<T>& g = out[std::size_t(i)];
        g.mean = {mean[i * 3], mean[i * 3 + 1], mean[i * 3 + 2]};
        Quat<T> q{quat[i * 4], quat[i * 4 + 1], quat[i * 4 + 2], quat[i * 4 + 3]};
        Mat3<T> rot = frames[std::size_t(i)] * q.to_matrix();
        Vec3<T> s{scale[i * 3], scale[i * 3 + 1], scale[i * 3 + 2]};
        Mat3<T> m = rot * Mat3<T>::diag(s);
        g.cov = m * m.transposed();
        g.opacity = opacity[std::size_t(i)];
        g.color = {color[i * 3], color[i * 3 + 1], color[i * 3 + 2]};
    }
    return out;
}

}  // namespace detail

/// Differentiable wrapper around the tiled rasterizer.
///
/// Inputs, all with leading dimension N (one row per primitive):
///   mean [N, 3] world means, quat [N, 4] rotations (normalize upstream; the
///   node differentiates the raw quaternion-to-matrix formula), scale [N, 3]
///   positive extents in scene units, opacity [N] in (0, 1), color [N, 3].
/// `frames` holds one fixed orientation matrix per primitive that the
/// decoded rotation composes with; the camera is a constant as well, so
/// gradients flow to the five attribute tensors only.
///
/// Output: [4, H, W] planar image, channels linear RGB then alpha, equal to
/// what rasterize() produces for the same primitives.
///
/// The backward pass rebuilds the screen-space state and walks each pixel
/// front to back twice: once to record per-contribution transmittance, once
/// in reverse with a suffix accumulator that turns the compositing products
/// into per-splat gradients. Saturated paths (opacity at its clamp, splats
/// culled or under the alpha floor) pass zero gradient, matching the
/// piecewise-constant forward behavior there. Depth ordering is treated as
/// locally constant.
template <typename T>
Var<T> render_gaussians(Tape<T>& t, Var<T> mean, Var<T> quat, Var<T> scale, Var<T> opacity,
                        Var<T> color, const std::vector<Mat3<T>>& frames, const Camera<T>& cam,
                        const RasterizeOptions& opt = {}) {
    const int n = int(frames.size());
    const Shape sm = t.shape(mean);
    if (sm.ndim != 2 || sm[0] != n || sm[1] != 3)
        throw InvalidInput("render_gaussians: mean expects [N, 3] matching frames");
    const Shape sq = t.shape(quat);
    if (sq.ndim != 2 || sq[0] != n || sq[1] != 4)
        throw InvalidInput("render_gaussians: quat expects [N, 4]");
    if (t.shape(scale) != sm || t.shape(color) != sm)
        throw InvalidInput("render_gaussians: scale and color expect [N, 3]");
    const Shape so = t.shape(opacity);
    if (so.ndim != 1 || so[0] != n)
        throw InvalidInput("render_gaussians: opacity expects [N]");
    if (cam.width <= 0 || cam.height <= 0)
        throw InvalidInput("render_gaussians: camera has empty image plane");

    Var<T> out = t.make(Shape{4, cam.height, cam.width});
    {
        auto posed = detail::pose_rows(t.vals(mean), t.vals(quat), t.vals(scale), t.vals(opacity),
                                       t.vals(color), frames);
        RenderTarget<T> target = rasterize(posed, cam, opt);
        auto& ov = t.vals(out);
        const std::int64_t hw = std::int64_t(cam.height) * cam.width;
        for (int y = 0; y < cam.height; ++y)
            for (int x = 0; x < cam.width; ++x) {
                const std::int64_t idx = std::int64_t(y) * cam.width + x;
                for (int c = 0; c < 3; ++c) ov[std::size_t(c * hw + idx)] = target.color.at(x, y, c);
                ov[std::size_t(3 * hw + idx)] = target.alpha.at(x, y, 0);
            }
    }

    t.push_backward([&t, mean, quat, scale, opacity, color, frames, cam, opt, out] {
        const auto& gout = t.grad(out);
        auto posed = detail::pose_rows(t.vals(mean), t.vals(quat), t.vals(scale), t.vals(opacity),
                                       t.vals(color), frames);
        int skipped = 0;
        auto splats = detail::prepare_splats(posed, cam, opt, &skipped);
        detail::sort_by_depth(splats);
        int tiles_x = 0, tiles_y = 0;
        auto buckets = detail::tile_buckets(splats, cam.width, cam.height, opt, &tiles_x, &tiles_y);

        const std::int64_t hw = std::int64_t(cam.height) * cam.width;
        const T clamp = T(opt.opacity_clamp), floor = T(opt.alpha_floor);
        const T stop = T(opt.stop_transmittance);

        // Per-splat accumulators over the screen-space quantities, indexed
        // like the sorted splat vector. qa/qb/qc follow the packed symmetric
        // convention of ScreenSplat (qb carries both off-diagonal slots).
        struct Acc {
            T mx = 0, my = 0;
            T qa = 0, qb = 0, qc = 0;
            T op = 0;
            Vec3<T> col{};
        };
        std::vector<Acc> acc(splats.size());
        const detail::ScreenSplat<T>* base = splats.data();

        struct Step {
            int k;
            T a, trans, power, dx, dy;
            bool a_clamped, p_clamped;
        };
        std::vector<Step> walk;
        walk.reserve(64);

        for (std::int64_t tl = 0; tl < std::int64_t(tiles_x) * tiles_y; ++tl) {
            const auto& bucket = buckets[std::size_t(tl)];
            if (bucket.empty()) continue;
            const int tx = int(tl % tiles_x), ty = int(tl / tiles_x);
            const int px1 = std::min(cam.width, (tx + 1) * opt.tile);
            const int py1 = std::min(cam.height, (ty + 1) * opt.tile);
            for (int y = ty * opt.tile; y < py1; ++y)
                for (int x = tx * opt.tile; x < px1; ++x) {
                    const std::int64_t idx = std::int64_t(y) * cam.width + x;
                    const Vec3<T> gc{gout[std::size_t(0 * hw + idx)],
                                     gout[std::size_t(1 * hw + idx)],
                                     gout[std::size_t(2 * hw + idx)]};
                    const T ga = gout[std::size_t(3 * hw + idx)];
                    if (gc.x == T(0) && gc.y == T(0) && gc.z == T(0) && ga == T(0)) continue;

                    // Forward re-walk, mirroring composite_pixel exactly.
                    const T px = T(x) + T(0.5), py = T(y) + T(0.5);
                    walk.clear();
                    T trans = T(1);
                    for (const detail::ScreenSplat<T>* s : bucket) {
                        T dx = px - s->mean.x, dy = py - s->mean.y;
                        T power =
                            T(-0.5) * (s->qa * dx * dx + T(2) * s->qb * dx * dy + s->qc * dy * dy);
                        bool p_clamped = power > T(0);
                        if (p_clamped) power = T(0);
                        T a = s->opacity * std::exp(power);
                        bool a_clamped = a > clamp;
                        if (a_clamped) a = clamp;
                        if (a < floor) continue;
                        walk.push_back(
                            {int(s - base), a, trans, power, dx, dy, a_clamped, p_clamped});
                        trans *= T(1) - a;
                        if (trans < stop) break;
                    }
                    const T t_end = trans;

                    // Reverse walk. With C = sum_j T_j a_j c_j and
                    // A = 1 - t_end, the alpha gradient needs the suffix
                    // sum S_j = sum_{l>j} T_l a_l c_l:
                    //   dC/da_j = T_j c_j - S_j / (1 - a_j)
                    //   dA/da_j = t_end / (1 - a_j)
                    Vec3<T> suffix{};
                    for (int j = int(walk.size()) - 1; j >= 0; --j) {
                        const Step& e = walk[std::size_t(j)];
                        const detail::ScreenSplat<T>& s = splats[std::size_t(e.k)];
                        Acc& a = acc[std::size_t(e.k)];
                        const T one_m = T(1) - e.a;
                        const Vec3<T> tc = s.color * e.trans;
                        a.col += gc * (e.trans * e.a);
                        const T galpha =
                            dot(gc, tc - suffix * (T(1) / one_m)) + ga * t_end / one_m;
                        if (!e.a_clamped) {
                            const T gexp = std::exp(e.power);
                            a.op += galpha * gexp;
                            const T gpower = galpha * s.opacity * gexp;
                            if (!e.p_clamped) {
                                a.qa += gpower * T(-0.5) * e.dx * e.dx;
                                a.qb += gpower * (-(e.dx * e.dy));
                                a.qc += gpower * T(-0.5) * e.dy * e.dy;
                                a.mx += gpower * (s.qa * e.dx + s.qb * e.dy);
                                a.my += gpower * (s.qb * e.dx + s.qc * e.dy);
                            }
                        }
                        suffix += tc * e.a;
                    }
                }
        }

        auto& gmean = t.grad(mean);
        auto& gquat = t.grad(quat);
        auto& gscale = t.grad(scale);
        auto& gop = t.grad(opacity);
        auto& gcol = t.grad(color);
        const auto& qv = t.vals(quat);
        const auto& sv = t.vals(scale);
        const auto& opv = t.vals(opacity);

        for (std::size_t k = 0; k < splats.size(); ++k) {
            const detail::ScreenSplat<T>& s = splats[k];
            const Acc& a = acc[k];
            const int i = s.index;
            const PosedGaussian<T>& g = posed[std::size_t(i)];

            gcol[std::size_t(i) * 3 + 0] += a.col.x;
            gcol[std::size_t(i) * 3 + 1] += a.col.y;
            gcol[std::size_t(i) * 3 + 2] += a.col.z;
            if (opv[std::size_t(i)] <= clamp) gop[std::size_t(i)] += a.op;

            // Rebuild the projection at this primitive. prepare_splats
            // admitted it, so the same projection succeeds here.
            const Vec3<T> p = cam.to_camera(g.mean);
            const T inv_z = T(1) / p.z;
            const Mat3<T> cov_cam = cam.rot * g.cov * cam.rot.transposed();
            const Vec3<T> r0{cam.fx * inv_z, T(0), -cam.fx * p.x * inv_z * inv_z};
            const Vec3<T> r1{T(0), cam.fy * inv_z, -cam.fy * p.y * inv_z * inv_z};

            // Screen covariance gradient through the inverse: with
            // Q = cov2^-1, d(loss)/d(cov2) = -Q gQ Q. The packed qb slot
            // holds the sum over both off-diagonals, so it splits in half
            // to form the full symmetric gQ.
            const T q00 = s.qa, q01 = s.qb, q11 = s.qc;
            const T gq00 = a.qa, gq01 = a.qb * T(0.5), gq11 = a.qc;
            const T a00 = q00 * gq00 + q01 * gq01, a01 = q00 * gq01 + q01 * gq11;
            const T a10 = q01 * gq00 + q11 * gq01, a11 = q01 * gq01 + q11 * gq11;
            const T gc00 = -(a00 * q00 + a01 * q01);
            const T gc01 = -(a00 * q01 + a01 * q11);
            const T gc11 = -(a10 * q01 + a11 * q11);

            // cov2 = J covc J^T gives gJ = 2 gcov2 J covc (rows) and
            // gcovc = J^T gcov2 J.
            const Vec3<T> gr0 = (cov_cam * (r0 * gc00 + r1 * gc01)) * T(2);
            const Vec3<T> gr1 = (cov_cam * (r0 * gc01 + r1 * gc11)) * T(2);
            const Mat3<T> gcov_cam = outer(r0, r0) * gc00 +
                                     (outer(r0, r1) + outer(r1, r0)) * gc01 +
                                     outer(r1, r1) * gc11;
            const Mat3<T> gcov_world = cam.rot.transposed() * gcov_cam * cam.rot;

            // Camera-space position picks up terms from the screen mean and
            // from the z-dependent Jacobian entries.
            Vec3<T> gp{};
            gp.x += a.mx * cam.fx * inv_z;
            gp.y += a.my * cam.fy * inv_z;
            gp.z += a.mx * (-cam.fx * p.x * inv_z * inv_z) + a.my * (-cam.fy * p.y * inv_z * inv_z);
            gp.x += gr0.z * (-cam.fx * inv_z * inv_z);
            gp.y += gr1.z * (-cam.fy * inv_z * inv_z);
            gp.z += gr0.x * (-cam.fx * inv_z * inv_z) +
                    gr0.z * (T(2) * cam.fx * p.x * inv_z * inv_z * inv_z) +
                    gr1.y * (-cam.fy * inv_z * inv_z) +
                    gr1.z * (T(2) * cam.fy * p.y * inv_z * inv_z * inv_z);
            const Vec3<T> gmu = tmul(cam.rot, gp);
            gmean[std::size_t(i) * 3 + 0] += gmu.x;
            gmean[std::size_t(i) * 3 + 1] += gmu.y;
            gmean[std::size_t(i) * 3 + 2] += gmu.z;

            // cov = M M^T with M = (frame Rq) diag(scale).
            const Quat<T> q{qv[std::size_t(i) * 4], qv[std::size_t(i) * 4 + 1],
                            qv[std::size_t(i) * 4 + 2], qv[std::size_t(i) * 4 + 3]};
            const Vec3<T> sc{sv[std::size_t(i) * 3], sv[std::size_t(i) * 3 + 1],
                             sv[std::size_t(i) * 3 + 2]};
            const Mat3<T> rtot = frames[std::size_t(i)] * q.to_matrix();
            const Mat3<T> m = rtot * Mat3<T>::diag(sc);
            const Mat3<T> gm = (gcov_world * m) * T(2);
            for (int j = 0; j < 3; ++j)
                gscale[std::size_t(i) * 3 + j] +=
                    gm(0, j) * rtot(0, j) + gm(1, j) * rtot(1, j) + gm(2, j) * rtot(2, j);
            Mat3<T> grq;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) grq(r, c) = gm(r, c) * sc[c];
            grq = frames[std::size_t(i)].transposed() * grq;

            // Partials of the quaternion-to-matrix formula, written against
            // the halved entries with the factor of two pulled out front.
            const T w = q.w, xq = q.x, yq = q.y, zq = q.z;
            const T gw = T(2) * (grq(0, 1) * (-zq) + grq(0, 2) * yq + grq(1, 0) * zq +
                                 grq(1, 2) * (-xq) + grq(2, 0) * (-yq) + grq(2, 1) * xq);
            const T gx = T(2) * (grq(0, 1) * yq + grq(0, 2) * zq + grq(1, 0) * yq +
                                 grq(1, 1) * (T(-2) * xq) + grq(1, 2) * (-w) + grq(2, 0) * zq +
                                 grq(2, 1) * w + grq(2, 2) * (T(-2) * xq));
            const T gy = T(2) * (grq(0, 0) * (T(-2) * yq) + grq(0, 1) * xq + grq(0, 2) * w +
                                 grq(1, 0) * xq + grq(1, 2) * zq + grq(2, 0) * (-w) +
                                 grq(2, 1) * zq + grq(2, 2) * (T(-2) * yq));
            const T gz = T(2) * (grq(0, 0) * (T(-2) * zq) + grq(0, 1) * (-w) + grq(0, 2) * xq +
                                 grq(1, 0) * w + grq(1, 1) * (T(-2) * zq) + grq(1, 2) * yq +
                                 grq(2, 0) * xq + grq(2, 1) * yq);
            gquat[std::size_t(i) * 4 + 0] += gw;
            gquat[std::size_t(i) * 4 + 1] += gx;
            gquat[std::size_t(i) * 4 + 2] += gy;
            gquat[std::size_t(i) * 4 + 3] += gz;
        }
    });
    return out;
}

/// Applies a fixed 3x3 matrix to each row of a [N, 3] tensor: y_r = M_r x_r.
/// The posing composition uses it to orient local offsets by their texel
/// frames inside a gradient graph.
template <typename T>
Var<T> transform_rows(Tape<T>& t, Var<T> x, const std::vector<Mat3<T>>& mats) {
    const Shape s = t.shape(x);
    if (s.ndim != 2 || s[1] != 3 || s[0] != int(mats.size()))
        throw InvalidInput("transform_rows: expects [N, 3] with one matrix per row");
    Var<T> out = t.make(s);
    auto& ov = t.vals(out);
    const auto& xv = t.vals(x);
    for (int i = 0; i < s[0]; ++i) {
        const Vec3<T> v{xv[i * 3], xv[i * 3 + 1], xv[i * 3 + 2]};
        const Vec3<T> y = mats[std::size_t(i)] * v;
        ov[i * 3] = y.x;
        ov[i * 3 + 1] = y.y;
        ov[i * 3 + 2] = y.z;
    }
    t.push_backward([&t, x, out, mats] {
        const auto& g = t.grad(out);
        auto& gx = t.grad(x);
        for (std::size_t i = 0; i < mats.size(); ++i) {
            const Vec3<T> gv{g[i * 3], g[i * 3 + 1], g[i * 3 + 2]};
            const Vec3<T> b = tmul(mats[i], gv);
            gx[i * 3] += b.x;
            gx[i * 3 + 1] += b.y;
            gx[i * 3 + 2] += b.z;
        }
    });
    return out;
}

}  // namespace relit::splat

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/stagecalib/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "relit/errors.hpp"

namespace relit::stagecalib {

namespace {

Mat3d identity_minus_outer(const Vec3d& r) {
    Mat3d m = Mat3d::identity();
    Mat3d rr = outer(r, r);
    m.c0 -= rr.c0;
    m.c1 -= rr.c1;
    m.c2 -= rr.c2;
    return m;
}

}  // namespace

LightCalibration calibrate_light(const std::vector<HighlightObs>& obs,
                                 const std::vector<Camera<double>>& cams,
                                 const SphereSpec& sphere) {
    if (sphere.radius <= 0) throw InvalidInput("calibrate_light: sphere radius must be positive");

    LightCalibration out;
    Mat3d a;
    a.c0 = a.c1 = a.c2 = Vec3d{};
    Vec3d b{};
    std::vector<std::pair<Vec3d, Vec3d>> rays;  // (origin on sphere, unit direction)
    std::set<int> used_cams;

    for (std::size_t i = 0; i < obs.size(); ++i) {
        const HighlightObs& o = obs[i];
        if (o.camera < 0 || o.camera >= int(cams.size()))
            throw InvalidInput("calibrate_light: observation references a missing camera");
        const Camera<double>& cam = cams[std::size_t(o.camera)];
        Vec3d origin = cam.center();
        Vec3d dir_cam{(o.pixel.x - cam.cx) / cam.fx, (o.pixel.y - cam.cy) / cam.fy, 1.0};
        Vec3d d = normalize(tmul(cam.rot, dir_cam));

        Vec3d oc = origin - sphere.center;
        double half_b = dot(oc, d);
        double disc = half_b * half_b - (dot(oc, oc) - sphere.radius * sphere.radius);
        if (disc < 0) {
            out.rejected.push_back({int(i), "ray misses the sphere"});
            continue;
        }
        double t = -half_b - std::sqrt(disc);
        if (t <= 0) {
            out.rejected.push_back({int(i), "sphere is behind or envelops the camera"});
            continue;
        }
        Vec3d hit = origin + d * t;
        Vec3d n = (hit - sphere.center) * (1.0 / sphere.radius);
        Vec3d refl = normalize(d - n * (2.0 * dot(d, n)));

        Mat3d proj = identity_minus_outer(refl);
        a.c0 += proj.c0;
        a.c1 += proj.c1;
        a.c2 += proj.c2;
        b += proj * hit;
        rays.emplace_back(hit, refl);
        used_cams.insert(o.camera);
    }

    out.used = int(rays.size());
    if (out.used < 2 || used_cams.size() < 2)
        throw InvalidInput(
            "calibrate_light: under-constrained, need at least two usable "
            "observations from distinct cameras");

    double trace = a.c0.x + a.c1.y + a.c2.z;
    double scale = trace / 3.0;
    if (!(a.det() > 1e-9 * scale * scale * scale))
        throw InvalidInput("calibrate_light: reflected rays are parallel, position under-constrained");

    out.position = solve3(a, b);
    double sq = 0;
    for (const auto& [origin, dir] : rays) {
        Vec3d offset = out.position - origin;
        Vec3d perp = offset - dir * dot(offset, dir);
        sq += dot(perp, perp);
    }
    out.residual = std::sqrt(sq / out.used);
    return out;
}

Vec3d calibrate_intensity(const std::vector<Vec3d>& highlight_rgb, double reflectance) {
    if (highlight_rgb.empty()) throw InvalidInput("calibrate_intensity: no measurements");
    if (reflectance <= 0) throw InvalidInput("calibrate_intensity: reflectance must be positive");
    Vec3d sum{};
    for (const Vec3d& v : highlight_rgb) sum += v;
    return sum * (1.0 / (reflectance * double(highlight_rgb.size())));
}

namespace {

/// Solves the 4x4 system m x = rhs in place by partial-pivot elimination.
void solve4(double m[4][4], double rhs[4]) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        if (std::abs(m[pivot][col]) < 1e-12)
            throw InvalidInput("calibrate_color: degenerate chart, measurements span too little");
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int row = col + 1; row < 4; ++row) {
            double f = m[row][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    for (int col = 3; col >= 0; --col) {
        double v = rhs[col];
        for (int k = col + 1; k < 4; ++k) v -= m[col][k] * rhs[k];
        rhs[col] = v / m[col][col];
    }
}

}  // namespace

ColorCalibration calibrate_color(const ColorChart& chart, bool affine) {
    const std::size_t count = chart.measured.size();
    if (count != chart.reference.size())
        throw InvalidInput("calibrate_color: measured and reference counts differ");
    if (count < 4) throw InvalidInput("calibrate_color: need at least four patches");
    for (const Vec3d& r : chart.reference)
        if (r.x <= 0 || r.y <= 0 || r.z <= 0)
            throw InvalidInput("calibrate_color: references must be strictly positive");

    ColorCalibration out;
    out.affine = affine;

    if (!affine) {
        Mat3d gram;
        gram.c0 = gram.c1 = gram.c2 = Vec3d{};
        Mat3d cross_t;  // sum of ref m^T
        cross_t.c0 = cross_t.c1 = cross_t.c2 = Vec3d{};
        for (std::size_t i = 0; i < count; ++i) {
            Mat3d mm = outer(chart.measured[i], chart.measured[i]);
            Mat3d rm = outer(chart.reference[i], chart.measured[i]);
            gram.c0 += mm.c0;
            gram.c1 += mm.c1;
            gram.c2 += mm.c2;
            cross_t.c0 += rm.c0;
            cross_t.c1 += rm.c1;
            cross_t.c2 += rm.c2;
        }
        double trace = gram.c0.x + gram.c1.y + gram.c2.z;
        double scale = trace / 3.0;
        if (!(gram.det() > 1e-9 * scale * scale * scale))
            throw InvalidInput("calibrate_color: degenerate chart, measurements span too little");
        out.matrix = cross_t * inverse(gram);
    } else {
        double gram[4][4] = {};
        double rhs[3][4] = {};
        for (std::size_t i = 0; i < count; ++i) {
            double m4[4] = {chart.measured[i].x, chart.measured[i].y, chart.measured[i].z, 1.0};
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) gram[r][c] += m4[r] * m4[c];
            for (int c = 0; c < 4; ++c) {
                rhs[0][c] += chart.reference[i].x * m4[c];
                rhs[1][c] += chart.reference[i].y * m4[c];
                rhs[2][c] += chart.reference[i].z * m4[c];
            }
        }
        double rows[3][4];
        for (int ch = 0; ch < 3; ++ch) {
            double work[4][4];
            std::copy(&gram[0][0], &gram[0][0] + 16, &work[0][0]);
            std::copy(rhs[ch], rhs[ch] + 4, rows[ch]);
            solve4(work, rows[ch]);
        }
        out.matrix.c0 = {rows[0][0], rows[1][0], rows[2][0]};
        out.matrix.c1 = {rows[0][1], rows[1][1], rows[2][1]};
        out.matrix.c2 = {rows[0][2], rows[1][2], rows[2][2]};
        out.offset = {rows[0][3], rows[1][3], rows[2][3]};
    }

    double sq = 0;
    for (std::size_t i = 0; i < count; ++i) {
        Vec3d err = out.matrix * chart.measured[i] + out.offset - chart.reference[i];
        sq += dot(err, err);
    }
    out.residual = std::sqrt(sq / (3.0 * double(count)));
    return out;
}

std::vector<FrameInterp> demux_interleaved(int count, int period, int tracking_slot) {
    if (count < 1) throw InvalidInput("demux_interleaved: need at least one frame");
    if (period < 2) throw InvalidInput("demux_interleaved: period must be at least 2");
    if (tracking_slot < 0 || tracking_slot >= period)
        throw InvalidInput("demux_interleaved: tracking slot outside the period");

    std::vector<FrameInterp> out(static_cast<std::size_t>(count));
    std::vector<int> tracking;
    for (int i = 0; i < count; ++i)
        if (i % period == tracking_slot) tracking.push_back(i);

    for (int i = 0; i < count; ++i) {
        FrameInterp& f = out[std::size_t(i)];
        if (i % period == tracking_slot) {
            f.role = FrameRole::tracking;
            f.prev = f.next = i;
            f.w_prev = 1.0;
            f.w_next = 0.0;
            continue;
        }
        f.role = FrameRole::olat;
        if (tracking.empty()) continue;
        auto after = std::upper_bound(tracking.begin(), tracking.end(), i);
        if (after == tracking.begin()) {
            f.next = *after;
            f.w_next = 1.0;
        } else if (after == tracking.end()) {
            f.prev = *(after - 1);
            f.w_prev = 1.0;
        } else {
            f.prev = *(after - 1);
            f.next = *after;
            f.w_prev = double(f.next - i) / double(f.next - f.prev);
            f.w_next = 1.0 - f.w_prev;
        }
    }
    return out;
}

}  // namespace relit::stagecalib

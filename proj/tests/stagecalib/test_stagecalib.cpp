// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "relit/errors.hpp"
#include "relit/core/quat.hpp"
#include "relit/rng.hpp"
#include "relit/stagecalib/calibrate.hpp"
#include "relit/stagecalib/manifest.hpp"

using namespace relit;
using namespace relit::stagecalib;

namespace {

/// Finds the sphere surface point whose mirror reflection connects `eye`
/// and `light`, by fixed-point iteration on the half-vector condition:
/// the surface normal must bisect the directions to both endpoints. This
/// is a different route than the solver under test, which traces pixel
/// rays and intersects rays in space.
Vec3d mirror_point(const Vec3d& eye, const Vec3d& light, const SphereSpec& sphere) {
    Vec3d n = normalize(normalize(eye - sphere.center) + normalize(light - sphere.center));
    for (int i = 0; i < 400; ++i) {
        Vec3d s = sphere.center + n * sphere.radius;
        Vec3d next = normalize(normalize(eye - s) + normalize(light - s));
        double step = length(next - n);
        n = next;
        if (step < 1e-16) break;
    }
    return sphere.center + n * sphere.radius;
}

/// Projects the mirror point of `light` into `cam`, checking the mirror
/// condition actually holds at convergence.
Vec2<double> highlight_pixel(const Camera<double>& cam, const Vec3d& light,
                             const SphereSpec& sphere) {
    Vec3d s = mirror_point(cam.center(), light, sphere);
    Vec3d n = (s - sphere.center) * (1.0 / sphere.radius);
    Vec3d d = normalize(s - cam.center());
    Vec3d refl = d - n * (2.0 * dot(d, n));
    REQUIRE(dot(refl, normalize(light - s)) > 1.0 - 1e-12);
    Vec3d in_cam = cam.to_camera(s);
    REQUIRE(in_cam.z > 0);
    Vec2<double> px = cam.project(in_cam);
    REQUIRE(px.x > 0);
    REQUIRE(px.y > 0);
    REQUIRE(px.x < cam.width);
    REQUIRE(px.y < cam.height);
    return px;
}

std::vector<Camera<double>> ring_cameras(int count, double distance, double height,
                                         double focal = 1100.0) {
    std::vector<Camera<double>> cams;
    for (int i = 0; i < count; ++i) {
        double angle = 2.0 * std::numbers::pi * i / count + 0.3;
        Vec3d eye{distance * std::cos(angle), height + 0.1 * i, distance * std::sin(angle)};
        cams.push_back(Camera<double>::look_at(eye, Vec3d{}, Vec3d{0, 1, 0}, 1280, 1024, focal));
    }
    return cams;
}

std::string temp_path(const char* name) {
    return std::string("/tmp/relit_stagecalib_") + name;
}

StageManifest small_manifest() {
    StageManifest m;
    m.period = 3;
    m.tracking_slot = 2;
    StageCamera cam;
    cam.id = "cam00";
    cam.camera = Camera<double>::look_at(Vec3d{0, 0.2, 1.4}, Vec3d{}, Vec3d{0, 1, 0}, 640, 480,
                                         800.0);
    cam.color_matrix = Mat3d::identity();
    m.cameras.push_back(cam);
    cam.id = "cam01";
    cam.camera = Camera<double>::look_at(Vec3d{0.9, -0.1, 1.1}, Vec3d{}, Vec3d{0, 1, 0}, 640,
                                         480, 800.0);
    m.cameras.push_back(cam);
    for (int i = 0; i < 3; ++i) {
        StageLight l;
        l.id = "L" + std::to_string(i);
        l.position = {0.4 * i, 0.5, 0.8};
        l.intensity = {1.0, 0.9, 0.8};
        m.lights.push_back(l);
    }
    Rng rng(31);
    for (int i = 0; i < 9; ++i) {
        StageFrame f;
        f.index = i;
        f.image = "images/f" + std::to_string(i) + ".png";
        f.matte = "mattes/f" + std::to_string(i) + ".png";
        if (i % 3 == 2) {
            f.role = FrameRole::tracking;
            f.expression.resize(kExpressionDim);
            for (float& v : f.expression) v = float(rng.uniform(-1.0, 1.0));
        } else {
            f.role = FrameRole::olat;
            f.light = "L" + std::to_string(i % 3);
            f.expression_path = "expr/f" + std::to_string(i) + ".f32";
        }
        m.frames.push_back(std::move(f));
    }
    return m;
}

}  // namespace

TEST_CASE("forward traced highlights pin the light to a tenth millimeter") {
    SphereSpec sphere;
    sphere.center = {0.02, -0.01, 0.03};
    sphere.radius = 0.1;
    const Vec3d light{0.5, 0.3, 0.8};

    auto cams = ring_cameras(2, 1.5, 0.2);
    std::vector<HighlightObs> obs;
    for (int i = 0; i < int(cams.size()); ++i)
        obs.push_back({i, highlight_pixel(cams[std::size_t(i)], light, sphere)});

    LightCalibration cal = calibrate_light(obs, cams, sphere);
    CHECK(cal.used == 2);
    CHECK(cal.rejected.empty());
    CHECK(length(cal.position - light) < 1e-4);
    CHECK(cal.residual < 1e-6);

    // More cameras, more lights.
    auto six = ring_cameras(6, 1.6, 0.1);
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Vec3d l{rng.uniform(-0.8, 0.8), rng.uniform(0.2, 0.9), rng.uniform(-0.8, 0.8)};
        if (length(l - sphere.center) < 0.5) {
            --trial;
            continue;
        }
        std::vector<HighlightObs> o;
        for (int i = 0; i < 6; ++i) o.push_back({i, highlight_pixel(six[std::size_t(i)], l, sphere)});
        LightCalibration c = calibrate_light(o, six, sphere);
        CHECK(length(c.position - l) < 1e-4);
        CHECK(c.residual < 1e-6);
    }
}

TEST_CASE("misses are rejected and degenerate sets refuse to solve") {
    SphereSpec sphere;
    sphere.radius = 0.1;
    auto cams = ring_cameras(3, 1.5, 0.2);
    const Vec3d light{0.5, 0.3, 0.8};

    // A pixel far off the sphere silhouette is rejected with a reason, and
    // the remaining two observations still solve.
    std::vector<HighlightObs> obs;
    obs.push_back({0, {5.0, 5.0}});
    obs.push_back({1, highlight_pixel(cams[1], light, sphere)});
    obs.push_back({2, highlight_pixel(cams[2], light, sphere)});
    LightCalibration cal = calibrate_light(obs, cams, sphere);
    CHECK(cal.used == 2);
    REQUIRE(cal.rejected.size() == 1);
    CHECK(cal.rejected[0].observation == 0);
    CHECK(cal.rejected[0].reason.find("misses") != std::string::npos);
    CHECK(length(cal.position - light) < 1e-4);

    // Fewer than two usable observations.
    CHECK_THROWS_AS(calibrate_light({{0, {5.0, 5.0}}, {1, highlight_pixel(cams[1], light, sphere)}},
                                    cams, sphere),
                    InvalidInput);

    // Two observations from the same camera do not constrain the point.
    CHECK_THROWS_AS(calibrate_light({{1, highlight_pixel(cams[1], light, sphere)},
                                     {1, highlight_pixel(cams[1], light, sphere)}},
                                    cams, sphere),
                    InvalidInput);

    // Cameras stacked on one axis aiming at the sphere center see reflections
    // along that same axis: parallel rays, no triangulation.
    std::vector<Camera<double>> axial;
    axial.push_back(Camera<double>::look_at(Vec3d{0, 0, 2}, Vec3d{}, Vec3d{0, 1, 0}, 640, 480, 900.0));
    axial.push_back(Camera<double>::look_at(Vec3d{0, 0, 3}, Vec3d{}, Vec3d{0, 1, 0}, 640, 480, 900.0));
    std::vector<HighlightObs> center_obs;
    for (int i = 0; i < 2; ++i) {
        Vec2<double> px = axial[std::size_t(i)].project(
            axial[std::size_t(i)].to_camera(Vec3d{0, 0, sphere.radius}));
        center_obs.push_back({i, px});
    }
    CHECK_THROWS_AS(calibrate_light(center_obs, axial, sphere), InvalidInput);

    CHECK_THROWS_AS(calibrate_light({{7, {1, 1}}, {8, {1, 1}}}, cams, sphere), InvalidInput);
    SphereSpec flat;
    flat.radius = 0.0;
    CHECK_THROWS_AS(calibrate_light(center_obs, axial, flat), InvalidInput);
}

// Highlight noise is amplified along the sphere-to-light axis: every reflected
// ray converges on the light from inside the narrow cone the sphere subtends
// (half angle asin(r / distance), about 6 degrees here), so triangulation
// depth is weakly constrained no matter how many cameras watch. Measured on
// this rig the error is linear in the noise, roughly 55 mm per pixel of
// highlight sigma, with a mean of about 5 mm at sigma 0.1 px and 29 mm at
// sigma 0.5 px. The checks below pin that scaling and the honest magnitudes.
TEST_CASE("recovery error grows linearly with highlight noise") {
    SphereSpec sphere;
    sphere.radius = 0.1;
    const Vec3d light{0.5, 0.3, 0.8};
    auto cams = ring_cameras(8, 0.6, 0.2, 2600.0);

    std::vector<Vec2<double>> clean;
    for (int i = 0; i < int(cams.size()); ++i)
        clean.push_back(highlight_pixel(cams[std::size_t(i)], light, sphere));

    auto mean_error = [&](double sigma) {
        double sum = 0;
        const int reps = 20;
        for (int rep = 0; rep < reps; ++rep) {
            Rng rng(4000 + std::uint64_t(rep));
            std::vector<HighlightObs> obs;
            for (int i = 0; i < int(cams.size()); ++i) {
                Vec2<double> px = clean[std::size_t(i)];
                px.x += rng.normal() * sigma;
                px.y += rng.normal() * sigma;
                obs.push_back({i, px});
            }
            LightCalibration cal = calibrate_light(obs, cams, sphere);
            double err = length(cal.position - light);
            CHECK(err < 0.2);
            sum += err;
        }
        return sum / reps;
    };

    std::vector<HighlightObs> exact;
    for (int i = 0; i < int(cams.size()); ++i) exact.push_back({i, clean[std::size_t(i)]});
    CHECK(length(calibrate_light(exact, cams, sphere).position - light) < 1e-4);

    double low = mean_error(0.1);
    double high = mean_error(0.5);
    CHECK(low < 0.012);
    CHECK(high < 0.06);
    CHECK(high / low > 3.0);
    CHECK(high / low < 8.0);
}

TEST_CASE("rigidly moving the whole rig moves the answer with it") {
    SphereSpec sphere;
    sphere.center = {0.01, 0.0, -0.02};
    sphere.radius = 0.1;
    const Vec3d light{0.45, 0.35, 0.75};
    auto cams = ring_cameras(3, 1.4, 0.15);
    std::vector<HighlightObs> obs;
    for (int i = 0; i < 3; ++i) obs.push_back({i, highlight_pixel(cams[std::size_t(i)], light, sphere)});
    LightCalibration base = calibrate_light(obs, cams, sphere);

    Rng rng(77);
    Vec3d axis = normalize(Vec3d{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    Quatd q = Quatd::axis_angle(axis, 1.1);
    Mat3d rot = q.to_matrix();
    Vec3d shift{0.3, -0.7, 0.4};

    std::vector<Camera<double>> moved = cams;
    for (Camera<double>& c : moved) {
        c.rot = c.rot * rot.transposed();
        c.trans = c.trans - c.rot * shift;
    }
    SphereSpec moved_sphere = sphere;
    moved_sphere.center = rot * sphere.center + shift;

    LightCalibration cal = calibrate_light(obs, moved, moved_sphere);
    Vec3d expect = rot * base.position + shift;
    CHECK(length(cal.position - expect) < 1e-6);
}

TEST_CASE("intensity reduction averages over the sphere reflectance") {
    std::vector<Vec3d> readings{{0.9, 0.6, 0.3}, {1.1, 0.8, 0.5}};
    Vec3d intensity = calibrate_intensity(readings, 0.5);
    CHECK(std::abs(intensity.x - 2.0) < 1e-12);
    CHECK(std::abs(intensity.y - 1.4) < 1e-12);
    CHECK(std::abs(intensity.z - 0.8) < 1e-12);
    CHECK_THROWS_AS(calibrate_intensity({}, 0.5), InvalidInput);
    CHECK_THROWS_AS(calibrate_intensity(readings, 0.0), InvalidInput);
}

TEST_CASE("color solves recover exact linear maps") {
    Rng rng(13);
    ColorChart chart;
    for (int i = 0; i < 12; ++i)
        chart.reference.push_back(
            {rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)});

    chart.measured = chart.reference;
    ColorCalibration ident = calibrate_color(chart);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(ident.matrix(r, c) - (r == c ? 1.0 : 0.0)) < 1e-9);
    CHECK(ident.residual < 1e-9);

    for (std::size_t i = 0; i < chart.measured.size(); ++i)
        chart.measured[i] = chart.reference[i] * 2.0;
    ColorCalibration half = calibrate_color(chart);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(half.matrix(r, c) - (r == c ? 0.5 : 0.0)) < 1e-9);
    CHECK(half.residual < 1e-9);

    for (int trial = 0; trial < 20; ++trial) {
        Mat3d map = Mat3d::identity();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) map(r, c) += rng.uniform(-0.25, 0.25);
        if (std::abs(map.det()) < 0.2) {
            --trial;
            continue;
        }
        for (std::size_t i = 0; i < chart.measured.size(); ++i)
            chart.measured[i] = map * chart.reference[i];
        ColorCalibration cal = calibrate_color(chart);
        Mat3d expect = inverse(map);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) CHECK(std::abs(cal.matrix(r, c) - expect(r, c)) < 1e-6);
        CHECK(cal.residual < 1e-9);
        CHECK(cal.offset.x == 0.0);
    }
}

TEST_CASE("degenerate or undersized charts are refused") {
    ColorChart chart;
    for (int i = 0; i < 3; ++i) {
        chart.measured.push_back({0.2 + i * 0.1, 0.3, 0.4});
        chart.reference.push_back({0.5, 0.5, 0.5});
    }
    CHECK_THROWS_AS(calibrate_color(chart), InvalidInput);

    chart.measured.push_back({0.1, 0.2, 0.3});
    CHECK_THROWS_AS(calibrate_color(chart), InvalidInput);  // size mismatch

    chart.reference.push_back({0.5, 0.5, 0.5});
    chart.reference[2] = {0.4, 0.0, 0.4};
    CHECK_THROWS_AS(calibrate_color(chart), InvalidInput);  // non-positive reference
    chart.reference[2] = {0.4, 0.4, 0.4};

    // All measurements on one line through the origin: rank 1.
    for (int i = 0; i < 4; ++i) chart.measured[std::size_t(i)] = Vec3d{0.1, 0.2, 0.3} * (1.0 + i);
    CHECK_THROWS_AS(calibrate_color(chart), InvalidInput);
}

TEST_CASE("residual separates exact maps from distorted ones") {
    Rng rng(29);
    ColorChart chart;
    for (int i = 0; i < 10; ++i)
        chart.reference.push_back(
            {rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)});
    Mat3d map = Mat3d::identity();
    map(0, 1) = 0.2;
    map(2, 0) = -0.1;
    for (const Vec3d& r : chart.reference) chart.measured.push_back(map * r);
    CHECK(calibrate_color(chart).residual < 1e-12);

    // A channel-wise square is not linear, so some residual must remain.
    for (Vec3d& v : chart.measured) v = {v.x * v.x, v.y, v.z};
    CHECK(calibrate_color(chart).residual > 1e-4);
}

TEST_CASE("affine mode recovers offsets the linear solve cannot") {
    Rng rng(41);
    ColorChart chart;
    for (int i = 0; i < 14; ++i)
        chart.measured.push_back(
            {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)});
    Mat3d map = Mat3d::identity();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) map(r, c) += rng.uniform(-0.2, 0.2);
    Vec3d offset{0.05, -0.02, 0.08};
    for (const Vec3d& m : chart.measured) chart.reference.push_back(map * m + offset);

    ColorCalibration affine = calibrate_color(chart, true);
    CHECK(affine.affine);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(std::abs(affine.matrix(r, c) - map(r, c)) < 1e-6);
    CHECK(length(affine.offset - offset) < 1e-6);
    CHECK(affine.residual < 1e-9);

    CHECK(calibrate_color(chart, false).residual > 1e-3);
}

TEST_CASE("interleave demux marks slots and interpolates between neighbors") {
    auto nine = demux_interleaved(9, 3, 2);
    REQUIRE(nine.size() == 9);
    for (int i = 0; i < 9; ++i)
        CHECK((nine[std::size_t(i)].role == FrameRole::tracking) == (i % 3 == 2));

    CHECK(nine[3].prev == 2);
    CHECK(nine[3].next == 5);
    CHECK(nine[3].w_prev == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(nine[3].w_next == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // Frames before the first tracking frame clamp onto it.
    CHECK(nine[0].prev == -1);
    CHECK(nine[0].next == 2);
    CHECK(nine[0].w_next == 1.0);
    CHECK(nine[0].w_prev == 0.0);

    // Frames after the last tracking frame clamp backwards.
    auto tail = demux_interleaved(9, 3, 0);
    CHECK(tail[8].prev == 6);
    CHECK(tail[8].next == -1);
    CHECK(tail[8].w_prev == 1.0);

    // Exactly midway lands on equal weights.
    auto mid = demux_interleaved(5, 2, 0);
    CHECK(mid[1].w_prev == 0.5);
    CHECK(mid[1].w_next == 0.5);

    // Tracking frames carry themselves.
    CHECK(nine[2].prev == 2);
    CHECK(nine[2].next == 2);
    CHECK(nine[2].w_prev == 1.0);

    CHECK_THROWS_AS(demux_interleaved(0), InvalidInput);
    CHECK_THROWS_AS(demux_interleaved(5, 1, 0), InvalidInput);
    CHECK_THROWS_AS(demux_interleaved(5, 3, 3), InvalidInput);
    CHECK_THROWS_AS(demux_interleaved(5, 3, -1), InvalidInput);
}

TEST_CASE("demux weights stay normalized over sweeps") {
    for (int period : {2, 3, 5})
        for (int slot = 0; slot < period; ++slot)
            for (int count : {1, 2, 3, 7, 16, 40}) {
                auto frames = demux_interleaved(count, period, slot);
                bool any_tracking = false;
                for (const FrameInterp& f : frames) any_tracking |= f.role == FrameRole::tracking;
                for (const FrameInterp& f : frames) {
                    CHECK(f.w_prev >= 0.0);
                    CHECK(f.w_next >= 0.0);
                    CHECK(f.w_prev <= 1.0);
                    CHECK(f.w_next <= 1.0);
                    if (any_tracking) {
                        CHECK(f.w_prev + f.w_next == doctest::Approx(1.0).epsilon(1e-12));
                        if (f.w_prev > 0) CHECK(f.prev >= 0);
                        if (f.w_next > 0) CHECK(f.next >= 0);
                    } else {
                        CHECK(f.prev == -1);
                        CHECK(f.next == -1);
                    }
                }
            }
}

TEST_CASE("manifest survives a save and load round trip") {
    StageManifest m = small_manifest();
    std::string path = temp_path("roundtrip.json");
    save_manifest(m, path);
    StageManifest back = load_manifest(path);
    std::remove(path.c_str());

    CHECK(back.schema_version == 1);
    CHECK(back.period == 3);
    CHECK(back.tracking_slot == 2);
    REQUIRE(back.cameras.size() == m.cameras.size());
    REQUIRE(back.lights.size() == m.lights.size());
    REQUIRE(back.frames.size() == m.frames.size());
    for (std::size_t i = 0; i < m.cameras.size(); ++i) {
        CHECK(back.cameras[i].id == m.cameras[i].id);
        CHECK(back.cameras[i].camera.fx == m.cameras[i].camera.fx);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                CHECK(back.cameras[i].camera.rot(r, c) == m.cameras[i].camera.rot(r, c));
                CHECK(back.cameras[i].color_matrix(r, c) == m.cameras[i].color_matrix(r, c));
            }
        CHECK(length(back.cameras[i].camera.trans - m.cameras[i].camera.trans) == 0.0);
    }
    for (std::size_t i = 0; i < m.lights.size(); ++i) {
        CHECK(back.lights[i].id == m.lights[i].id);
        CHECK(length(back.lights[i].position - m.lights[i].position) == 0.0);
        CHECK(length(back.lights[i].intensity - m.lights[i].intensity) == 0.0);
    }
    for (std::size_t i = 0; i < m.frames.size(); ++i) {
        CHECK(back.frames[i].index == m.frames[i].index);
        CHECK((back.frames[i].role == m.frames[i].role));
        CHECK(back.frames[i].light == m.frames[i].light);
        CHECK(back.frames[i].image == m.frames[i].image);
        CHECK(back.frames[i].expression_path == m.frames[i].expression_path);
        REQUIRE(back.frames[i].expression.size() == m.frames[i].expression.size());
        for (std::size_t k = 0; k < m.frames[i].expression.size(); ++k)
            CHECK(back.frames[i].expression[k] == m.frames[i].expression[k]);
    }
    CHECK(validate_manifest(back).empty());

    CHECK_THROWS_AS(load_manifest(temp_path("missing.json")), IoError);
}

TEST_CASE("each manifest violation is reported by name") {
    auto has = [](const std::vector<std::string>& all, const char* needle) {
        for (const std::string& s : all)
            if (s.find(needle) != std::string::npos) return true;
        return false;
    };

    StageManifest m = small_manifest();
    m.frames[0].light = "L9";
    auto bad = validate_manifest(m);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].find("frame 0") != std::string::npos);
    CHECK(bad[0].find("L9") != std::string::npos);

    m = small_manifest();
    m.frames[4].index = 1;
    CHECK(has(validate_manifest(m), "strictly increasing"));

    m = small_manifest();
    m.frames[2].role = FrameRole::olat;
    m.frames[2].light = "L0";
    CHECK(has(validate_manifest(m), "tracking slot but is marked olat"));

    m = small_manifest();
    m.frames[1].role = FrameRole::tracking;
    m.frames[1].light.clear();
    CHECK(has(validate_manifest(m), "outside the tracking slot"));

    m = small_manifest();
    m.frames[2].light = "L1";
    CHECK(has(validate_manifest(m), "tracking frame but references"));

    m = small_manifest();
    m.frames[0].light.clear();
    CHECK(has(validate_manifest(m), "without a light id"));

    m = small_manifest();
    m.cameras[1].id = m.cameras[0].id;
    CHECK(has(validate_manifest(m), "duplicate camera id"));

    m = small_manifest();
    m.lights[2].id = m.lights[0].id;
    CHECK(has(validate_manifest(m), "duplicate light id"));

    m = small_manifest();
    m.frames[2].expression.resize(10);
    CHECK(has(validate_manifest(m), "length 10"));

    m = small_manifest();
    m.frames[2].expression_path = "also.f32";
    CHECK(has(validate_manifest(m), "both an expression path and inline"));

    m = small_manifest();
    m.schema_version = 2;
    CHECK(has(validate_manifest(m), "schema_version"));

    m = small_manifest();
    m.tracking_slot = 5;
    CHECK(has(validate_manifest(m), "tracking_slot"));
}

TEST_CASE("expression blobs round trip as raw float32") {
    Rng rng(91);
    std::vector<float> values(static_cast<std::size_t>(kExpressionDim));
    for (float& v : values) v = float(rng.uniform(-2.0, 2.0));
    std::string path = temp_path("expr.f32");
    save_expression_blob(values, path);
    std::vector<float> back = load_expression_blob(path);
    REQUIRE(back.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(back[i] == values[i]);

    // A byte count that is not a multiple of four is malformed.
    std::FILE* f = std::fopen(path.c_str(), "ab");
    REQUIRE(f);
    std::fputc(0, f);
    std::fclose(f);
    CHECK_THROWS_AS(load_expression_blob(path), InvalidInput);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_expression_blob(temp_path("missing.f32")), IoError);
}

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/stagecalib/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "relit/errors.hpp"

namespace relit::stagecalib {

namespace {

using Json = nlohmann::ordered_json;

Json mat_to_json(const Mat3d& m) {
    Json rows = Json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rows.push_back(m(r, c));
    return rows;
}

Mat3d mat_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 9)
        throw InvalidInput(std::string("manifest: ") + what + " must be 9 numbers, row-major");
    Mat3d m;
    m.c0 = {j[0].get<double>(), j[3].get<double>(), j[6].get<double>()};
    m.c1 = {j[1].get<double>(), j[4].get<double>(), j[7].get<double>()};
    m.c2 = {j[2].get<double>(), j[5].get<double>(), j[8].get<double>()};
    return m;
}

Json vec_to_json(const Vec3d& v) { return Json::array({v.x, v.y, v.z}); }

Vec3d vec_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 3)
        throw InvalidInput(std::string("manifest: ") + what + " must be 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

StageManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("manifest: cannot read " + path);
    Json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw InvalidInput("manifest: " + path + " is not valid JSON: " + e.what());
    }

    StageManifest m;
    try {
        m.schema_version = root.at("schema_version").get<int>();
        m.period = root.value("period", 3);
        m.tracking_slot = root.value("tracking_slot", 2);
        for (const Json& jc : root.at("cameras")) {
            StageCamera cam;
            cam.id = jc.at("id").get<std::string>();
            cam.camera.width = jc.at("width").get<int>();
            cam.camera.height = jc.at("height").get<int>();
            cam.camera.fx = jc.at("fx").get<double>();
            cam.camera.fy = jc.at("fy").get<double>();
            cam.camera.cx = jc.at("cx").get<double>();
            cam.camera.cy = jc.at("cy").get<double>();
            cam.camera.rot = mat_from_json(jc.at("rotation"), "camera rotation");
            cam.camera.trans = vec_from_json(jc.at("translation"), "camera translation");
            cam.color_matrix = jc.contains("color_matrix")
                                   ? mat_from_json(jc["color_matrix"], "color matrix")
                                   : Mat3d::identity();
            m.cameras.push_back(std::move(cam));
        }
        for (const Json& jl : root.at("lights")) {
            StageLight light;
            light.id = jl.at("id").get<std::string>();
            light.position = vec_from_json(jl.at("position"), "light position");
            light.intensity = jl.contains("intensity")
                                  ? vec_from_json(jl["intensity"], "light intensity")
                                  : Vec3d{1, 1, 1};
            m.lights.push_back(std::move(light));
        }
        for (const Json& jf : root.at("frames")) {
            StageFrame frame;
            frame.index = jf.at("index").get<int>();
            std::string role = jf.at("role").get<std::string>();
            if (role == "olat")
                frame.role = FrameRole::olat;
            else if (role == "tracking")
                frame.role = FrameRole::tracking;
            else
                throw InvalidInput("manifest: unknown frame role \"" + role + "\"");
            frame.light = jf.value("light", "");
            frame.image = jf.value("image", "");
            frame.matte = jf.value("matte", "");
            if (jf.contains("expression")) {
                const Json& je = jf["expression"];
                if (je.is_string()) {
                    frame.expression_path = je.get<std::string>();
                } else if (je.is_array()) {
                    frame.expression.reserve(je.size());
                    for (const Json& v : je) frame.expression.push_back(v.get<float>());
                } else {
                    throw InvalidInput("manifest: expression must be a path or an array");
                }
            }
            m.frames.push_back(std::move(frame));
        }
    } catch (const InvalidInput&) {
        throw;
    } catch (const std::exception& e) {
        throw InvalidInput("manifest: " + path + " has the wrong shape: " + e.what());
    }
    return m;
}

void save_manifest(const StageManifest& manifest, const std::string& path) {
    Json root;
    root["schema_version"] = manifest.schema_version;
    root["period"] = manifest.period;
    root["tracking_slot"] = manifest.tracking_slot;
    Json cams = Json::array();
    for (const StageCamera& c : manifest.cameras) {
        Json jc;
        jc["id"] = c.id;
        jc["width"] = c.camera.width;
        jc["height"] = c.camera.height;
        jc["fx"] = c.camera.fx;
        jc["fy"] = c.camera.fy;
        jc["cx"] = c.camera.cx;
        jc["cy"] = c.camera.cy;
        jc["rotation"] = mat_to_json(c.camera.rot);
        jc["translation"] = vec_to_json(c.camera.trans);
        jc["color_matrix"] = mat_to_json(c.color_matrix);
        cams.push_back(std::move(jc));
    }
    root["cameras"] = std::move(cams);
    Json lights = Json::array();
    for (const StageLight& l : manifest.lights) {
        Json jl;
        jl["id"] = l.id;
        jl["position"] = vec_to_json(l.position);
        jl["intensity"] = vec_to_json(l.intensity);
        lights.push_back(std::move(jl));
    }
    root["lights"] = std::move(lights);
    Json frames = Json::array();
    for (const StageFrame& f : manifest.frames) {
        Json jf;
        jf["index"] = f.index;
        jf["role"] = f.role == FrameRole::tracking ? "tracking" : "olat";
        if (!f.light.empty()) jf["light"] = f.light;
        if (!f.image.empty()) jf["image"] = f.image;
        if (!f.matte.empty()) jf["matte"] = f.matte;
        if (!f.expression_path.empty())
            jf["expression"] = f.expression_path;
        else if (!f.expression.empty())
            jf["expression"] = f.expression;
        frames.push_back(std::move(jf));
    }
    root["frames"] = std::move(frames);

    std::ofstream out(path);
    if (!out) throw IoError("manifest: cannot write " + path);
    out << root.dump(2) << "\n";
    if (!out) throw IoError("manifest: short write to " + path);
}

std::vector<std::string> validate_manifest(const StageManifest& m) {
    std::vector<std::string> bad;
    auto note = [&](std::string msg) { bad.push_back(std::move(msg)); };

    if (m.schema_version != 1)
        note("unsupported schema_version " + std::to_string(m.schema_version));
    if (m.period < 2) note("period must be at least 2");
    if (m.tracking_slot < 0 || m.tracking_slot >= m.period)
        note("tracking_slot " + std::to_string(m.tracking_slot) + " outside period " +
             std::to_string(m.period));

    std::set<std::string> cam_ids;
    for (const StageCamera& c : m.cameras) {
        if (!cam_ids.insert(c.id).second) note("duplicate camera id \"" + c.id + "\"");
        if (c.camera.width <= 0 || c.camera.height <= 0)
            note("camera \"" + c.id + "\" has a non-positive image size");
        if (c.camera.fx == 0 || c.camera.fy == 0)
            note("camera \"" + c.id + "\" has a zero focal length");
    }
    std::set<std::string> light_ids;
    for (const StageLight& l : m.lights)
        if (!light_ids.insert(l.id).second) note("duplicate light id \"" + l.id + "\"");

    const StageFrame* prev = nullptr;
    for (const StageFrame& f : m.frames) {
        std::string tag = "frame " + std::to_string(f.index);
        if (prev && f.index <= prev->index)
            note(tag + " breaks the strictly increasing index order (follows " +
                 std::to_string(prev->index) + ")");
        prev = &f;

        bool slot_is_tracking = (f.index % m.period + m.period) % m.period == m.tracking_slot;
        if (slot_is_tracking && f.role != FrameRole::tracking)
            note(tag + " sits in the tracking slot but is marked olat");
        if (!slot_is_tracking && f.role == FrameRole::tracking)
            note(tag + " is marked tracking outside the tracking slot");

        if (f.role == FrameRole::olat) {
            if (f.light.empty())
                note(tag + " is a lighting frame without a light id");
            else if (!light_ids.count(f.light))
                note(tag + " references unknown light \"" + f.light + "\"");
        } else if (!f.light.empty()) {
            note(tag + " is a tracking frame but references light \"" + f.light + "\"");
        }
        if (!f.expression_path.empty() && !f.expression.empty())
            note(tag + " carries both an expression path and inline values");
        if (!f.expression.empty() && int(f.expression.size()) != kExpressionDim)
            note(tag + " inline expression has length " + std::to_string(f.expression.size()) +
                 ", expected " + std::to_string(kExpressionDim));
    }
    return bad;
}

std::vector<float> load_expression_blob(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("expression blob: cannot read " + path);
    std::streamoff size = in.tellg();
    if (size % 4 != 0)
        throw InvalidInput("expression blob: " + path + " is not a whole number of float32");
    std::vector<float> values(std::size_t(size) / 4);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(values.data()), size);
    if (!in) throw IoError("expression blob: short read from " + path);
    return values;
}

void save_expression_blob(const std::vector<float>& values, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("expression blob: cannot write " + path);
    out.write(reinterpret_cast<const char*>(values.data()),
              std::streamsize(values.size() * sizeof(float)));
    if (!out) throw IoError("expression blob: short write to " + path);
}

}  // namespace relit::stagecalib

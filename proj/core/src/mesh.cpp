// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/core/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "relit/errors.hpp"

namespace relit {
namespace {

// One OBJ face corner: indices into the v/vt/vn streams, -1 when absent.
struct Corner {
    int v = -1, vt = -1, vn = -1;
    bool operator<(const Corner& o) const {
        if (v != o.v) return v < o.v;
        if (vt != o.vt) return vt < o.vt;
        return vn < o.vn;
    }
};

// Parses "3", "3/1", "3//2", "3/1/2". OBJ indices are 1-based; negative
// values count back from the end of the stream seen so far.
Corner parse_corner(const std::string& token, int nv, int nvt, int nvn) {
    Corner c;
    int field = 0;
    std::size_t pos = 0;
    while (pos <= token.size() && field < 3) {
        std::size_t slash = token.find('/', pos);
        std::string part = token.substr(pos, slash == std::string::npos ? slash : slash - pos);
        if (!part.empty()) {
            int idx = std::stoi(part);
            int count = field == 0 ? nv : (field == 1 ? nvt : nvn);
            idx = idx > 0 ? idx - 1 : count + idx;
            if (idx < 0 || idx >= count) throw InvalidInput("load_obj: face index out of range");
            (field == 0 ? c.v : field == 1 ? c.vt : c.vn) = idx;
        }
        if (slash == std::string::npos) break;
        pos = slash + 1;
        ++field;
    }
    if (c.v < 0) throw InvalidInput("load_obj: face corner without vertex index");
    return c;
}

}  // namespace

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_obj: cannot open " + path);

    std::vector<Vec3d> vs;
    std::vector<Vec2d> vts;
    std::vector<Vec3d> vns;
    TriMesh mesh;
    std::map<Corner, int> merged;
    bool any_vt = false, any_vn = false;

    auto emit = [&](const Corner& c) {
        auto it = merged.find(c);
        if (it != merged.end()) return it->second;
        int idx = int(mesh.positions.size());
        mesh.positions.push_back(vs[c.v]);
        if (c.vt >= 0) {
            any_vt = true;
            mesh.uvs.resize(idx + 1);
            mesh.uvs[idx] = vts[c.vt];
        } else if (any_vt) {
            mesh.uvs.resize(idx + 1);
        }
        if (c.vn >= 0) {
            any_vn = true;
            mesh.normals.resize(idx + 1);
            mesh.normals[idx] = vns[c.vn];
        } else if (any_vn) {
            mesh.normals.resize(idx + 1);
        }
        merged[c] = idx;
        return idx;
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        try {
            if (tag == "v") {
                Vec3d p;
                ss >> p.x >> p.y >> p.z;
                vs.push_back(p);
            } else if (tag == "vt") {
                Vec2d t;
                ss >> t.x >> t.y;
                vts.push_back(t);
            } else if (tag == "vn") {
                Vec3d n;
                ss >> n.x >> n.y >> n.z;
                vns.push_back(n);
            } else if (tag == "f") {
                std::vector<int> poly;
                std::string token;
                while (ss >> token)
                    poly.push_back(emit(parse_corner(token, int(vs.size()), int(vts.size()),
                                                     int(vns.size()))));
                if (poly.size() < 3) throw InvalidInput("face with fewer than 3 corners");
                for (std::size_t i = 2; i < poly.size(); ++i)
                    mesh.faces.push_back({poly[0], poly[int(i) - 1], poly[int(i)]});
            }
            // Other tags (o, g, s, usemtl, mtllib) carry no geometry; skip.
        } catch (const std::exception& e) {
            throw InvalidInput("load_obj: " + path + ":" + std::to_string(line_no) + ": " +
                               e.what());
        }
        if (ss.fail() && !ss.eof()) {
            throw InvalidInput("load_obj: " + path + ":" + std::to_string(line_no) +
                               ": malformed numeric field");
        }
    }
    if (mesh.positions.empty()) throw InvalidInput("load_obj: " + path + ": no vertices");
    if (!mesh.uvs.empty()) mesh.uvs.resize(mesh.positions.size());
    if (!mesh.normals.empty()) mesh.normals.resize(mesh.positions.size());
    return mesh;
}

void save_obj(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_obj: cannot open " + path);
    char buf[256];
    for (const Vec3d& p : mesh.positions) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
        out << buf;
    }
    for (const Vec2d& t : mesh.uvs) {
        std::snprintf(buf, sizeof buf, "vt %.9g %.9g\n", t.x, t.y);
        out << buf;
    }
    for (const Vec3d& n : mesh.normals) {
        std::snprintf(buf, sizeof buf, "vn %.9g %.9g %.9g\n", n.x, n.y, n.z);
        out << buf;
    }
    const bool vt = mesh.has_uvs(), vn = mesh.has_normals();
    for (const auto& f : mesh.faces) {
        out << 'f';
        for (int k = 0; k < 3; ++k) {
            int i = f[k] + 1;
            if (vt && vn)
                out << ' ' << i << '/' << i << '/' << i;
            else if (vt)
                out << ' ' << i << '/' << i;
            else if (vn)
                out << ' ' << i << "//" << i;
            else
                out << ' ' << i;
        }
        out << '\n';
    }
    if (!out) throw IoError("save_obj: write failed for " + path);
}

void compute_vertex_normals(TriMesh& mesh) {
    mesh.normals.assign(mesh.positions.size(), Vec3d(0, 0, 0));
    for (const auto& f : mesh.faces) {
        const Vec3d& a = mesh.positions[f[0]];
        // Cross product length is twice the face area, so accumulation is
        // area-weighted for free.
        Vec3d fn = cross(mesh.positions[f[1]] - a, mesh.positions[f[2]] - a);
        for (int k = 0; k < 3; ++k) mesh.normals[f[k]] += fn;
    }
    for (Vec3d& n : mesh.normals) {
        double len = length(n);
        n = len > 1e-12 ? n / len : Vec3d(0, 0, 1);
    }
}

}  // namespace relit

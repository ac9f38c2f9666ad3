// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/io/pfm.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "relit/errors.hpp"

namespace relit {
namespace {

// PFM headers are whitespace-separated tokens; comments are not part of the
// format. The single whitespace byte after the scale token ends the header.
std::string next_token(std::istream& in) {
    std::string tok;
    in >> tok;
    if (!in) throw IoError("load_pfm: truncated header");
    return tok;
}

void byteswap_floats(float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t u;
        std::memcpy(&u, &data[i], 4);
        u = __builtin_bswap32(u);
        std::memcpy(&data[i], &u, 4);
    }
}

constexpr bool host_little_endian() { return std::endian::native == std::endian::little; }

}  // namespace

Imagef load_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_pfm: cannot open " + path);

    std::string magic = next_token(in);
    int channels;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw IoError("load_pfm: " + path + ": bad magic '" + magic + "'");

    int width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(next_token(in));
        height = std::stoi(next_token(in));
        scale = std::stod(next_token(in));
    } catch (const std::exception&) {
        throw IoError("load_pfm: " + path + ": malformed header");
    }
    if (width <= 0 || height <= 0 || scale == 0.0)
        throw IoError("load_pfm: " + path + ": bad dimensions or scale");
    in.get();  // single whitespace separating header from raster

    Imagef img(width, height, channels);
    std::size_t row_floats = std::size_t(width) * channels;
    // PFM rasters run bottom-to-top.
    for (int y = height - 1; y >= 0; --y) {
        float* row = &img.at(0, y, 0);
        in.read(reinterpret_cast<char*>(row), std::streamsize(row_floats * 4));
        if (!in) throw IoError("load_pfm: " + path + ": truncated raster");
        if ((scale < 0.0) != host_little_endian()) byteswap_floats(row, row_floats);
    }
    float mag = float(std::abs(scale));
    if (mag != 1.0f)
        for (float& v : img.data) v *= mag;
    return img;
}

void save_pfm(const Imagef& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw InvalidInput("save_pfm: image must have 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_pfm: cannot open " + path);
    out << (img.channels == 3 ? "PF" : "Pf") << '\n'
        << img.width << ' ' << img.height << '\n'
        << (host_little_endian() ? "-1.0" : "1.0") << '\n';
    std::size_t row_floats = std::size_t(img.width) * img.channels;
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(&img.data[std::size_t(y) * row_floats]),
                  std::streamsize(row_floats * 4));
    if (!out) throw IoError("save_pfm: write failed for " + path);
}

}  // namespace relit

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/io/png.hpp"

#include <png.h>

#include <cstdio>
#include <vector>

#include "relit/errors.hpp"

namespace relit {
namespace {

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

// libpng reports errors through longjmp; the handler lands back in the
// calling function, which must only throw after tearing the structs down.

}  // namespace

Imagef load_png(const std::string& path, bool srgb) {
    FileCloser fc;
    fc.f = std::fopen(path.c_str(), "rb");
    if (!fc.f) throw IoError("load_png: cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("load_png: libpng init failed");
    }

    std::vector<png_byte> raster;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("load_png: " + path + ": decode failed");
    }

    png_init_io(png, fc.f);
    png_read_info(png, info);

    png_uint_32 width = png_get_image_width(png, info);
    png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_swap(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    int channels = png_get_channels(png, info);
    bit_depth = png_get_bit_depth(png, info);
    std::size_t rowbytes = png_get_rowbytes(png, info);
    raster.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Imagef img(int(width), int(height), channels);
    const float inv = bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
    for (png_uint_32 y = 0; y < height; ++y) {
        const png_byte* row = raster.data() + y * rowbytes;
        for (png_uint_32 x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                float v;
                if (bit_depth == 16) {
                    const png_uint_16* row16 = reinterpret_cast<const png_uint_16*>(row);
                    v = float(row16[x * channels + c]) * inv;
                } else {
                    v = float(row[x * channels + c]) * inv;
                }
                // Alpha (last channel of 2- or 4-channel images) is linear.
                bool is_alpha = (channels == 2 || channels == 4) && c == channels - 1;
                if (srgb && !is_alpha) v = srgb_decode(v);
                img.at(int(x), int(y), c) = v;
            }
        }
    }
    return img;
}

void save_png(const Imagef& img, const std::string& path, bool srgb) {
    if (img.channels != 1 && img.channels != 3 && img.channels != 4)
        throw InvalidInput("save_png: image must have 1, 3, or 4 channels");
    FileCloser fc;
    fc.f = std::fopen(path.c_str(), "wb");
    if (!fc.f) throw IoError("save_png: cannot open " + path);

    std::vector<png_byte> raster(std::size_t(img.width) * img.height * img.channels);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) {
        png_byte* row = raster.data() + std::size_t(y) * img.width * img.channels;
        rows[y] = row;
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                float v = img.at(x, y, c);
                bool is_alpha = img.channels == 4 && c == 3;
                if (srgb && !is_alpha) v = srgb_encode(v);
                v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
                row[x * img.channels + c] = png_byte(v * 255.0f + 0.5f);
            }
        }
    }

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("save_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("save_png: " + path + ": encode failed");
    }

    png_init_io(png, fc.f);
    int color_type = img.channels == 1   ? PNG_COLOR_TYPE_GRAY
                     : img.channels == 3 ? PNG_COLOR_TYPE_RGB
                                         : PNG_COLOR_TYPE_RGBA;
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace relit

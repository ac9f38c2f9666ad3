// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/io/exr.hpp"

#include <ImathBox.h>
#include <ImfChannelList.h>
#include <ImfFrameBuffer.h>
#include <ImfHeader.h>
#include <ImfInputFile.h>
#include <ImfOutputFile.h>

#include <cstddef>

#include "relit/errors.hpp"

namespace relit {

Imagef load_exr(const std::string& path) {
    try {
        Imf::InputFile file(path.c_str());
        Imath::Box2i dw = file.header().dataWindow();
        int width = dw.max.x - dw.min.x + 1;
        int height = dw.max.y - dw.min.y + 1;

        const Imf::ChannelList& channels = file.header().channels();
        const char* names3[3] = {"R", "G", "B"};
        bool rgb = channels.findChannel("R") && channels.findChannel("G") &&
                   channels.findChannel("B");
        const char* mono = nullptr;
        if (!rgb) {
            if (channels.findChannel("Y"))
                mono = "Y";
            else if (channels.begin() != channels.end())
                mono = channels.begin().name();
            else
                throw IoError("load_exr: " + path + ": no channels");
        }

        Imagef img(width, height, rgb ? 3 : 1);
        std::size_t xs = sizeof(float) * img.channels;
        std::size_t ys = xs * std::size_t(width);
        // Slice base points at the pixel with coordinates (0, 0) in the data
        // window's frame, which may lie outside the buffer.
        char* origin = reinterpret_cast<char*>(img.data.data()) -
                       std::ptrdiff_t(dw.min.x) * std::ptrdiff_t(xs) -
                       std::ptrdiff_t(dw.min.y) * std::ptrdiff_t(ys);
        Imf::FrameBuffer fb;
        if (rgb) {
            for (int c = 0; c < 3; ++c)
                fb.insert(names3[c],
                          Imf::Slice(Imf::FLOAT, origin + c * sizeof(float), xs, ys));
        } else {
            fb.insert(mono, Imf::Slice(Imf::FLOAT, origin, xs, ys));
        }
        file.setFrameBuffer(fb);
        file.readPixels(dw.min.y, dw.max.y);
        return img;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError("load_exr: " + path + ": " + e.what());
    }
}

void save_exr(const Imagef& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw InvalidInput("save_exr: image must have 1 or 3 channels");
    try {
        Imf::Header header(img.width, img.height);
        header.compression() = Imf::ZIP_COMPRESSION;
        const char* names3[3] = {"R", "G", "B"};
        if (img.channels == 3)
            for (const char* n : names3) header.channels().insert(n, Imf::Channel(Imf::FLOAT));
        else
            header.channels().insert("Y", Imf::Channel(Imf::FLOAT));

        std::size_t xs = sizeof(float) * img.channels;
        std::size_t ys = xs * std::size_t(img.width);
        char* base = const_cast<char*>(reinterpret_cast<const char*>(img.data.data()));
        Imf::FrameBuffer fb;
        if (img.channels == 3) {
            for (int c = 0; c < 3; ++c)
                fb.insert(names3[c], Imf::Slice(Imf::FLOAT, base + c * sizeof(float), xs, ys));
        } else {
            fb.insert("Y", Imf::Slice(Imf::FLOAT, base, xs, ys));
        }
        Imf::OutputFile file(path.c_str(), header);
        file.setFrameBuffer(fb);
        file.writePixels(img.height);
    } catch (const std::exception& e) {
        throw IoError("save_exr: " + path + ": " + e.what());
    }
}

}  // namespace relit

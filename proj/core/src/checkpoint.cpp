// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/neural/checkpoint.hpp"

#include <fstream>

#include "relit/errors.hpp"

namespace relit {
namespace {

constexpr char kMagic[8] = {'R', 'L', 'C', 'K', 'P', 'T', '0', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void write_le(std::ostream& out, U v) {
    unsigned char buf[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = (unsigned char)(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename U>
U read_le(std::istream& in) {
    unsigned char buf[sizeof(U)];
    in.read(reinterpret_cast<char*>(buf), sizeof(U));
    if (!in) throw IoError("checkpoint: truncated file");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(buf[i]) << (8 * i);
    return v;
}

}  // namespace

std::size_t CheckpointTensor::dtype_size(int dtype) {
    switch (dtype) {
        case kF32:
        case kI32:
            return 4;
        case kF64:
        case kU64:
            return 8;
    }
    throw InvalidInput("checkpoint: unknown dtype " + std::to_string(dtype));
}

void write_checkpoint(const std::string& path, const std::vector<CheckpointTensor>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("checkpoint: cannot open " + path);
    out.write(kMagic, 8);
    write_le<std::uint32_t>(out, kVersion);
    write_le<std::uint32_t>(out, std::uint32_t(tensors.size()));
    for (const CheckpointTensor& t : tensors) {
        std::size_t expect = std::size_t(t.numel()) * CheckpointTensor::dtype_size(t.dtype);
        if (t.bytes.size() != expect)
            throw InvalidInput("checkpoint: payload size mismatch for " + t.name);
        write_le<std::uint32_t>(out, std::uint32_t(t.name.size()));
        out.write(t.name.data(), std::streamsize(t.name.size()));
        write_le<std::uint8_t>(out, std::uint8_t(t.dtype));
        write_le<std::uint8_t>(out, std::uint8_t(t.dims.size()));
        for (std::uint32_t d : t.dims) write_le<std::uint32_t>(out, d);
        write_le<std::uint64_t>(out, std::uint64_t(t.bytes.size()));
        out.write(reinterpret_cast<const char*>(t.bytes.data()), std::streamsize(t.bytes.size()));
    }
    if (!out) throw IoError("checkpoint: write failed for " + path);
}

std::vector<CheckpointTensor> read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw IoError("checkpoint: " + path + " is not a checkpoint file");
    std::uint32_t version = read_le<std::uint32_t>(in);
    if (version != kVersion)
        throw IoError("checkpoint: unsupported version " + std::to_string(version));
    std::uint32_t count = read_le<std::uint32_t>(in);
    if (count > 1u << 20) throw IoError("checkpoint: implausible tensor count");

    std::vector<CheckpointTensor> tensors(count);
    for (CheckpointTensor& t : tensors) {
        std::uint32_t name_len = read_le<std::uint32_t>(in);
        if (name_len > 4096) throw IoError("checkpoint: implausible name length");
        t.name.resize(name_len);
        in.read(t.name.data(), name_len);
        t.dtype = int(read_le<std::uint8_t>(in));
        CheckpointTensor::dtype_size(t.dtype);  // validates
        std::uint8_t ndim = read_le<std::uint8_t>(in);
        if (ndim > 8) throw IoError("checkpoint: implausible rank for " + t.name);
        t.dims.resize(ndim);
        for (std::uint32_t& d : t.dims) d = read_le<std::uint32_t>(in);
        std::uint64_t byte_len = read_le<std::uint64_t>(in);
        std::uint64_t expect = std::uint64_t(t.numel()) * CheckpointTensor::dtype_size(t.dtype);
        if (byte_len != expect) throw IoError("checkpoint: payload size mismatch for " + t.name);
        t.bytes.resize(byte_len);
        in.read(reinterpret_cast<char*>(t.bytes.data()), std::streamsize(byte_len));
        if (!in) throw IoError("checkpoint: truncated payload for " + t.name);
    }
    return tensors;
}

}  // namespace relit

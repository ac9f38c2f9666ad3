// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "relit/neural/param_store.hpp"

namespace relit {

/// One tensor record in the checkpoint container.
struct CheckpointTensor {
    static constexpr int kF32 = 0, kF64 = 1, kI32 = 2, kU64 = 3;

    std::string name;
    int dtype = kF32;
    std::vector<std::uint32_t> dims;
    std::vector<unsigned char> bytes;

    std::int64_t numel() const {
        std::int64_t n = 1;
        for (std::uint32_t d : dims) n *= std::int64_t(d);
        return n;
    }

    static std::size_t dtype_size(int dtype);
};

/// Binary container: 8-byte magic, format version, tensor count, then one
/// length-prefixed record per tensor. All integers little-endian.
void write_checkpoint(const std::string& path, const std::vector<CheckpointTensor>& tensors);
std::vector<CheckpointTensor> read_checkpoint(const std::string& path);

namespace detail {

template <typename T>
CheckpointTensor pack_vector(const std::string& name, const Shape& shape,
                             const std::vector<T>& data) {
    CheckpointTensor t;
    t.name = name;
    t.dtype = sizeof(T) == 8 ? CheckpointTensor::kF64 : CheckpointTensor::kF32;
    for (int i = 0; i < shape.ndim; ++i) t.dims.push_back(std::uint32_t(shape[i]));
    if (shape.ndim == 0) t.dims.push_back(1);
    t.bytes.resize(data.size() * sizeof(T));
    std::memcpy(t.bytes.data(), data.data(), t.bytes.size());
    return t;
}

template <typename T>
void unpack_vector(const CheckpointTensor& t, std::vector<T>* out) {
    std::int64_t n = t.numel();
    out->resize(std::size_t(n));
    if (t.dtype == CheckpointTensor::kF32) {
        const float* src = reinterpret_cast<const float*>(t.bytes.data());
        for (std::int64_t i = 0; i < n; ++i) (*out)[i] = T(src[i]);
    } else if (t.dtype == CheckpointTensor::kF64) {
        const double* src = reinterpret_cast<const double*>(t.bytes.data());
        for (std::int64_t i = 0; i < n; ++i) (*out)[i] = T(src[i]);
    } else {
        throw InvalidInput("checkpoint: tensor " + t.name + " is not floating point");
    }
}

}  // namespace detail

/// Serializes parameters and Adam state under "param/", "adam_m/",
/// "adam_v/" prefixes plus the step counter.
template <typename T>
std::vector<CheckpointTensor> pack_param_store(const ParamStore<T>& store) {
    std::vector<CheckpointTensor> out;
    for (const auto& [name, e] : store.entries()) {
        out.push_back(detail::pack_vector("param/" + name, e.shape, e.value));
        out.push_back(detail::pack_vector("adam_m/" + name, e.shape, e.m));
        out.push_back(detail::pack_vector("adam_v/" + name, e.shape, e.v));
    }
    CheckpointTensor step;
    step.name = "meta/step";
    step.dtype = CheckpointTensor::kU64;
    step.dims = {1};
    step.bytes.resize(8);
    std::uint64_t s = std::uint64_t(store.step());
    std::memcpy(step.bytes.data(), &s, 8);
    out.push_back(step);
    return out;
}

/// Rebuilds a store from records; scalar widths convert as needed.
template <typename T>
void unpack_param_store(const std::vector<CheckpointTensor>& tensors, ParamStore<T>* store) {
    for (const CheckpointTensor& t : tensors) {
        if (t.name.rfind("param/", 0) != 0) continue;
        std::string name = t.name.substr(6);
        Shape shape;
        if (t.dims.size() > 4) throw InvalidInput("checkpoint: too many axes for " + t.name);
        shape.ndim = int(t.dims.size());
        for (std::size_t i = 0; i < t.dims.size(); ++i) shape.d[i] = int(t.dims[i]);
        auto& e = store->has(name) ? store->at(name) : store->add(name, shape);
        if (!(e.shape == shape)) throw InvalidInput("checkpoint: shape mismatch for " + name);
        detail::unpack_vector(t, &e.value);
        e.grad.assign(e.value.size(), T(0));
    }
    for (const CheckpointTensor& t : tensors) {
        bool is_m = t.name.rfind("adam_m/", 0) == 0;
        bool is_v = t.name.rfind("adam_v/", 0) == 0;
        if (is_m || is_v) {
            std::string name = t.name.substr(7);
            if (!store->has(name)) throw InvalidInput("checkpoint: moment without param " + name);
            detail::unpack_vector(t, is_m ? &store->at(name).m : &store->at(name).v);
        } else if (t.name == "meta/step") {
            if (t.dtype != CheckpointTensor::kU64 || t.bytes.size() != 8)
                throw InvalidInput("checkpoint: bad step record");
            std::uint64_t s;
            std::memcpy(&s, t.bytes.data(), 8);
            store->set_step(std::int64_t(s));
        }
    }
}

}  // namespace relit

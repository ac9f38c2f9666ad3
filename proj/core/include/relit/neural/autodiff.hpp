// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

#include "relit/errors.hpp"

namespace relit {

/// Dense tensor extent, up to 4 axes. Scalars use ndim 0 and one element.
struct Shape {
    std::array<int, 4> d{1, 1, 1, 1};
    int ndim = 0;

    Shape() = default;
    Shape(std::initializer_list<int> dims) {
        if (dims.size() > 4) throw InvalidInput("Shape: more than 4 axes");
        ndim = int(dims.size());
        int i = 0;
        for (int v : dims) {
            if (v < 0) throw InvalidInput("Shape: negative extent");
            d[i++] = v;
        }
    }

    std::int64_t numel() const {
        std::int64_t n = 1;
        for (int i = 0; i < ndim; ++i) n *= d[i];
        return n;
    }

    bool operator==(const Shape& o) const {
        if (ndim != o.ndim) return false;
        for (int i = 0; i < ndim; ++i)
            if (d[i] != o.d[i]) return false;
        return true;
    }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    int operator[](int i) const { return d[i]; }
};

/// Handle to a tape entry.
template <typename T>
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Reverse-mode tape. Forward passes append value buffers and backward
/// closures; backward(loss) seeds the loss gradient and replays the closures
/// last to first. One tape serves one forward/backward pair; training builds
/// a fresh tape per step.
template <typename T>
class Tape {
  public:
    /// Registers a new entry. Forward values start zeroed; the caller (an op
    /// implementation) fills them before recording its backward closure.
    /// Takes the shape by value: callers routinely pass shape(other), and a
    /// reference into shapes_ would dangle once push_back reallocates.
    Var<T> make(Shape shape) {
        Var<T> v{int(shapes_.size())};
        shapes_.push_back(shape);
        vals_.emplace_back(std::size_t(shape.numel()), T(0));
        grads_.emplace_back();
        return v;
    }

    Var<T> constant(Shape shape, const T* data) {
        Var<T> v = make(shape);
        std::copy(data, data + shape.numel(), vals_[v.id].begin());
        return v;
    }

    Var<T> scalar(T value) {
        Var<T> v = make(Shape{});
        vals_[v.id][0] = value;
        return v;
    }

    /// Returned by value for the same aliasing reason as make.
    Shape shape(Var<T> v) const { return shapes_[v.id]; }

    std::vector<T>& vals(Var<T> v) { return vals_[v.id]; }
    const std::vector<T>& vals(Var<T> v) const { return vals_[v.id]; }

    /// Gradient buffer, allocated zeroed on first touch so forward-only
    /// graphs cost no gradient memory.
    std::vector<T>& grad(Var<T> v) {
        auto& g = grads_[v.id];
        if (g.empty()) g.assign(std::size_t(shapes_[v.id].numel()), T(0));
        return g;
    }

    void push_backward(std::function<void()> fn) { backward_.push_back(std::move(fn)); }

    /// Runs the reverse sweep from a scalar loss.
    void backward(Var<T> loss) {
        if (shapes_[loss.id].numel() != 1)
            throw InvalidInput("Tape::backward: loss must be scalar");
        grad(loss)[0] = T(1);
        for (auto it = backward_.rbegin(); it != backward_.rend(); ++it) (*it)();
    }

    std::size_t size() const { return shapes_.size(); }

  private:
    std::vector<Shape> shapes_;
    std::vector<std::vector<T>> vals_;
    std::vector<std::vector<T>> grads_;
    std::vector<std::function<void()>> backward_;
};

}  // namespace relit

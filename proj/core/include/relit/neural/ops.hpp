// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstring>
#include <vector>

#include "relit/core/vec.hpp"
#include "relit/neural/autodiff.hpp"

namespace relit {

// ---------------------------------------------------------------------------
// Elementwise

template <typename T>
Var<T> add(Tape<T>& t, Var<T> a, Var<T> b) {
    if (t.shape(a) != t.shape(b)) throw InvalidInput("add: shape mismatch");
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &bv = t.vals(b);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
    t.push_backward([&t, a, b, out] {
        const auto& g = t.grad(out);
        auto &ga = t.grad(a), &gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
        }
    });
    return out;
}

template <typename T>
Var<T> sub(Tape<T>& t, Var<T> a, Var<T> b) {
    if (t.shape(a) != t.shape(b)) throw InvalidInput("sub: shape mismatch");
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &bv = t.vals(b);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
    t.push_backward([&t, a, b, out] {
        const auto& g = t.grad(out);
        auto &ga = t.grad(a), &gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i];
            gb[i] -= g[i];
        }
    });
    return out;
}

template <typename T>
Var<T> mul(Tape<T>& t, Var<T> a, Var<T> b) {
    if (t.shape(a) != t.shape(b)) throw InvalidInput("mul: shape mismatch");
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &bv = t.vals(b);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
    t.push_backward([&t, a, b, out] {
        const auto& g = t.grad(out);
        const auto &av = t.vals(a), &bv = t.vals(b);
        auto &ga = t.grad(a), &gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] * bv[i];
            gb[i] += g[i] * av[i];
        }
    });
    return out;
}

template <typename T>
Var<T> div(Tape<T>& t, Var<T> a, Var<T> b) {
    if (t.shape(a) != t.shape(b)) throw InvalidInput("div: shape mismatch");
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &bv = t.vals(b);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] / bv[i];
    t.push_backward([&t, a, b, out] {
        const auto& g = t.grad(out);
        const auto &bv = t.vals(b), &ov = t.vals(out);
        auto &ga = t.grad(a), &gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] / bv[i];
            gb[i] -= g[i] * ov[i] / bv[i];
        }
    });
    return out;
}

template <typename T>
Var<T> mul_const(Tape<T>& t, Var<T> a, T c) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * c;
    t.push_backward([&t, a, out, c] {
        const auto& g = t.grad(out);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
    });
    return out;
}

template <typename T>
Var<T> add_const(Tape<T>& t, Var<T> a, T c) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + c;
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    });
    return out;
}

template <typename T>
Var<T> square(Tape<T>& t, Var<T> a) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * av[i];
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        const auto& av = t.vals(a);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += T(2) * av[i] * g[i];
    });
    return out;
}

template <typename T>
Var<T> abs_val(Tape<T>& t, Var<T> a) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::abs(av[i]);
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        const auto& av = t.vals(a);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i)
            ga[i] += av[i] > T(0) ? g[i] : (av[i] < T(0) ? -g[i] : T(0));
    });
    return out;
}

template <typename T>
Var<T> exp_val(Tape<T>& t, Var<T> a) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::exp(av[i]);
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        const auto& ov = t.vals(out);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * ov[i];
    });
    return out;
}

template <typename T>
Var<T> sqrt_shifted(Tape<T>& t, Var<T> a, T eps) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::sqrt(av[i] + eps);
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        const auto& ov = t.vals(out);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * T(0.5) / ov[i];
    });
    return out;
}

template <typename T>
Var<T> leaky_relu(Tape<T>& t, Var<T> a, T slope) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] > T(0) ? av[i] : slope * av[i];
    t.push_backward([&t, a, out, slope] {
        const auto& g = t.grad(out);
        const auto& av = t.vals(a);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += av[i] > T(0) ? g[i] : slope * g[i];
    });
    return out;
}

template <typename T>
Var<T> relu(Tape<T>& t, Var<T> a) {
    return leaky_relu(t, a, T(0));
}

template <typename T>
Var<T> sigmoid(Tape<T>& t, Var<T> a) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) {
        T x = av[i];
        ov[i] = x >= T(0) ? T(1) / (T(1) + std::exp(-x))
                          : std::exp(x) / (T(1) + std::exp(x));
    }
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        const auto& ov = t.vals(out);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * ov[i] * (T(1) - ov[i]);
    });
    return out;
}

template <typename T>
Var<T> softplus(Tape<T>& t, Var<T> a) {
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i) {
        T x = av[i];
        ov[i] = x > T(20) ? x : std::log1p(std::exp(x));
    }
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        const auto& av = t.vals(a);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            T x = av[i];
            T s = x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
            ga[i] += g[i] * s;
        }
    });
    return out;
}

/// Elementwise max(a, 0)^n for integer n >= 1, zero below the clamp.
template <typename T>
Var<T> powi(Tape<T>& t, Var<T> a, int n) {
    if (n < 1) throw InvalidInput("powi: exponent must be positive");
    Var<T> out = t.make(t.shape(a));
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (std::size_t i = 0; i < ov.size(); ++i)
        ov[i] = av[i] > T(0) ? std::pow(av[i], T(n)) : T(0);
    t.push_backward([&t, a, out, n] {
        const auto& g = t.grad(out);
        const auto& av = t.vals(a);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (av[i] > T(0)) ga[i] += g[i] * T(n) * std::pow(av[i], T(n - 1));
    });
    return out;
}

// ---------------------------------------------------------------------------
// Reductions

template <typename T>
Var<T> sum(Tape<T>& t, Var<T> a) {
    Var<T> out = t.make(Shape{});
    const auto& av = t.vals(a);
    T acc = 0;
    for (T v : av) acc += v;
    t.vals(out)[0] = acc;
    t.push_backward([&t, a, out] {
        T g = t.grad(out)[0];
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
    });
    return out;
}

template <typename T>
Var<T> mean(Tape<T>& t, Var<T> a) {
    std::int64_t n = t.shape(a).numel();
    if (n == 0) throw InvalidInput("mean: empty tensor");
    return mul_const(t, sum(t, a), T(1) / T(n));
}

// ---------------------------------------------------------------------------
// Row-structured ops on [N, C] matrices

/// Euclidean length of each row, smoothed by eps inside the root.
template <typename T>
Var<T> row_norm(Tape<T>& t, Var<T> a, T eps) {
    const Shape& s = t.shape(a);
    if (s.ndim != 2) throw InvalidInput("row_norm: expects [N, C]");
    int n = s[0], c = s[1];
    Var<T> out = t.make(Shape{n});
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (int r = 0; r < n; ++r) {
        T acc = 0;
        for (int j = 0; j < c; ++j) acc += av[r * c + j] * av[r * c + j];
        ov[r] = std::sqrt(acc + eps);
    }
    t.push_backward([&t, a, out, n, c] {
        const auto& g = t.grad(out);
        const auto& av = t.vals(a);
        const auto& ov = t.vals(out);
        auto& ga = t.grad(a);
        for (int r = 0; r < n; ++r) {
            T f = g[r] / ov[r];
            for (int j = 0; j < c; ++j) ga[r * c + j] += f * av[r * c + j];
        }
    });
    return out;
}

/// Scales each row to unit length; eps keeps the zero row finite.
template <typename T>
Var<T> normalize_rows(Tape<T>& t, Var<T> a, T eps) {
    const Shape& s = t.shape(a);
    if (s.ndim != 2) throw InvalidInput("normalize_rows: expects [N, C]");
    int n = s[0], c = s[1];
    Var<T> out = t.make(s);
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    std::vector<T> lens(n);
    for (int r = 0; r < n; ++r) {
        T acc = 0;
        for (int j = 0; j < c; ++j) acc += av[r * c + j] * av[r * c + j];
        lens[r] = std::sqrt(acc + eps);
        for (int j = 0; j < c; ++j) ov[r * c + j] = av[r * c + j] / lens[r];
    }
    t.push_backward([&t, a, out, n, c, lens] {
        const auto& g = t.grad(out);
        const auto& ov = t.vals(out);
        auto& ga = t.grad(a);
        for (int r = 0; r < n; ++r) {
            T proj = 0;
            for (int j = 0; j < c; ++j) proj += ov[r * c + j] * g[r * c + j];
            T inv = T(1) / lens[r];
            for (int j = 0; j < c; ++j)
                ga[r * c + j] += (g[r * c + j] - ov[r * c + j] * proj) * inv;
        }
    });
    return out;
}

/// Repeats a [C] vector across N rows.
template <typename T>
Var<T> tile_rows(Tape<T>& t, Var<T> v, int n) {
    const Shape& s = t.shape(v);
    if (s.ndim != 1) throw InvalidInput("tile_rows: expects [C]");
    int c = s[0];
    Var<T> out = t.make(Shape{n, c});
    auto& ov = t.vals(out);
    const auto& vv = t.vals(v);
    for (int r = 0; r < n; ++r)
        std::copy(vv.begin(), vv.end(), ov.begin() + std::size_t(r) * c);
    t.push_backward([&t, v, out, n, c] {
        const auto& g = t.grad(out);
        auto& gv = t.grad(v);
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < c; ++j) gv[j] += g[std::size_t(r) * c + j];
    });
    return out;
}

template <typename T>
Var<T> concat_cols(Tape<T>& t, Var<T> a, Var<T> b) {
    const Shape &sa = t.shape(a), &sb = t.shape(b);
    if (sa.ndim != 2 || sb.ndim != 2 || sa[0] != sb[0])
        throw InvalidInput("concat_cols: expects [N, A] and [N, B]");
    int n = sa[0], ca = sa[1], cb = sb[1];
    Var<T> out = t.make(Shape{n, ca + cb});
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &bv = t.vals(b);
    for (int r = 0; r < n; ++r) {
        std::copy_n(av.begin() + std::size_t(r) * ca, ca, ov.begin() + std::size_t(r) * (ca + cb));
        std::copy_n(bv.begin() + std::size_t(r) * cb, cb,
                    ov.begin() + std::size_t(r) * (ca + cb) + ca);
    }
    t.push_backward([&t, a, b, out, n, ca, cb] {
        const auto& g = t.grad(out);
        auto &ga = t.grad(a), &gb = t.grad(b);
        for (int r = 0; r < n; ++r) {
            for (int j = 0; j < ca; ++j) ga[std::size_t(r) * ca + j] += g[std::size_t(r) * (ca + cb) + j];
            for (int j = 0; j < cb; ++j)
                gb[std::size_t(r) * cb + j] += g[std::size_t(r) * (ca + cb) + ca + j];
        }
    });
    return out;
}

template <typename T>
Var<T> slice_cols(Tape<T>& t, Var<T> a, int c0, int c1) {
    const Shape& s = t.shape(a);
    if (s.ndim != 2 || c0 < 0 || c1 > s[1] || c0 >= c1)
        throw InvalidInput("slice_cols: bad range");
    int n = s[0], c = s[1], w = c1 - c0;
    Var<T> out = t.make(Shape{n, w});
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (int r = 0; r < n; ++r)
        std::copy_n(av.begin() + std::size_t(r) * c + c0, w, ov.begin() + std::size_t(r) * w);
    t.push_backward([&t, a, out, n, c, c0, w] {
        const auto& g = t.grad(out);
        auto& ga = t.grad(a);
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < w; ++j) ga[std::size_t(r) * c + c0 + j] += g[std::size_t(r) * w + j];
    });
    return out;
}

/// Per-row inner product of two [N, C] matrices, yielding [N].
template <typename T>
Var<T> row_dot(Tape<T>& t, Var<T> a, Var<T> b) {
    const Shape& s = t.shape(a);
    if (s.ndim != 2 || t.shape(b) != s) throw InvalidInput("row_dot: expects matching [N, C]");
    int n = s[0], c = s[1];
    Var<T> out = t.make(Shape{n});
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &bv = t.vals(b);
    for (int r = 0; r < n; ++r) {
        T acc = 0;
        for (int j = 0; j < c; ++j) acc += av[r * c + j] * bv[r * c + j];
        ov[r] = acc;
    }
    t.push_backward([&t, a, b, out, n, c] {
        const auto& g = t.grad(out);
        const auto &av = t.vals(a), &bv = t.vals(b);
        auto &ga = t.grad(a), &gb = t.grad(b);
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < c; ++j) {
                ga[r * c + j] += g[r] * bv[r * c + j];
                gb[r * c + j] += g[r] * av[r * c + j];
            }
    });
    return out;
}

/// Scales row r of a [N, C] matrix by the r-th entry of a [N] vector.
template <typename T>
Var<T> scale_rows(Tape<T>& t, Var<T> a, Var<T> s) {
    const Shape& sa = t.shape(a);
    if (sa.ndim != 2 || t.shape(s).ndim != 1 || t.shape(s)[0] != sa[0])
        throw InvalidInput("scale_rows: expects [N, C] and [N]");
    int n = sa[0], c = sa[1];
    Var<T> out = t.make(sa);
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &sv = t.vals(s);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < c; ++j) ov[r * c + j] = av[r * c + j] * sv[r];
    t.push_backward([&t, a, s, out, n, c] {
        const auto& g = t.grad(out);
        const auto &av = t.vals(a), &sv = t.vals(s);
        auto &ga = t.grad(a), &gs = t.grad(s);
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < c; ++j) {
                ga[r * c + j] += g[r * c + j] * sv[r];
                gs[r] += g[r * c + j] * av[r * c + j];
            }
    });
    return out;
}

/// Applies a fixed per-row rotation: row r of the [N, 3] output is
/// rot[r] * a[r]. The matrices are constants; gradients pass through the
/// transpose.
template <typename T>
Var<T> rotate_rows(Tape<T>& t, Var<T> a, const std::vector<Mat3<T>>& rot) {
    const Shape& s = t.shape(a);
    if (s.ndim != 2 || s[1] != 3 || s[0] != int(rot.size()))
        throw InvalidInput("rotate_rows: expects [N, 3] with one matrix per row");
    int n = s[0];
    Var<T> out = t.make(s);
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    for (int r = 0; r < n; ++r) {
        Vec3<T> v{av[r * 3], av[r * 3 + 1], av[r * 3 + 2]};
        Vec3<T> w = rot[std::size_t(r)] * v;
        ov[r * 3] = w.x;
        ov[r * 3 + 1] = w.y;
        ov[r * 3 + 2] = w.z;
    }
    t.push_backward([&t, a, out, rot, n] {
        const auto& g = t.grad(out);
        auto& ga = t.grad(a);
        for (int r = 0; r < n; ++r) {
            Vec3<T> gw{g[r * 3], g[r * 3 + 1], g[r * 3 + 2]};
            Vec3<T> gv = tmul(rot[std::size_t(r)], gw);
            ga[r * 3] += gv.x;
            ga[r * 3 + 1] += gv.y;
            ga[r * 3 + 2] += gv.z;
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Channel-structured ops on [C, H, W] maps

template <typename T>
Var<T> concat_channels(Tape<T>& t, Var<T> a, Var<T> b) {
    const Shape &sa = t.shape(a), &sb = t.shape(b);
    if (sa.ndim != 3 || sb.ndim != 3 || sa[1] != sb[1] || sa[2] != sb[2])
        throw InvalidInput("concat_channels: expects [Ca, H, W] and [Cb, H, W]");
    Var<T> out = t.make(Shape{sa[0] + sb[0], sa[1], sa[2]});
    auto& ov = t.vals(out);
    const auto &av = t.vals(a), &bv = t.vals(b);
    std::copy(av.begin(), av.end(), ov.begin());
    std::copy(bv.begin(), bv.end(), ov.begin() + av.size());
    t.push_backward([&t, a, b, out] {
        const auto& g = t.grad(out);
        auto &ga = t.grad(a), &gb = t.grad(b);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[ga.size() + i];
    });
    return out;
}

template <typename T>
Var<T> slice_channels(Tape<T>& t, Var<T> a, int c0, int c1) {
    const Shape& s = t.shape(a);
    if (s.ndim != 3 || c0 < 0 || c1 > s[0] || c0 >= c1)
        throw InvalidInput("slice_channels: bad range");
    std::size_t plane = std::size_t(s[1]) * s[2];
    Var<T> out = t.make(Shape{c1 - c0, s[1], s[2]});
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    std::copy_n(av.begin() + c0 * plane, (c1 - c0) * plane, ov.begin());
    t.push_backward([&t, a, out, c0, plane] {
        const auto& g = t.grad(out);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[c0 * plane + i] += g[i];
    });
    return out;
}

/// Fills every pixel of an [C, H, W] map with the [C] vector.
template <typename T>
Var<T> broadcast_chw(Tape<T>& t, Var<T> v, int h, int w) {
    const Shape& s = t.shape(v);
    if (s.ndim != 1) throw InvalidInput("broadcast_chw: expects [C]");
    int c = s[0];
    Var<T> out = t.make(Shape{c, h, w});
    auto& ov = t.vals(out);
    const auto& vv = t.vals(v);
    std::size_t plane = std::size_t(h) * w;
    for (int ch = 0; ch < c; ++ch)
        std::fill_n(ov.begin() + ch * plane, plane, vv[ch]);
    t.push_backward([&t, v, out, c, plane] {
        const auto& g = t.grad(out);
        auto& gv = t.grad(v);
        for (int ch = 0; ch < c; ++ch) {
            T acc = 0;
            for (std::size_t i = 0; i < plane; ++i) acc += g[ch * plane + i];
            gv[ch] += acc;
        }
    });
    return out;
}

/// Reads one [C] column per listed texel from a [C, S, S] map, producing
/// [N, C]. `texels` holds flat indices j * S + i.
template <typename T>
Var<T> gather_texels(Tape<T>& t, Var<T> map, const std::vector<int>& texels) {
    const Shape& s = t.shape(map);
    if (s.ndim != 3) throw InvalidInput("gather_texels: expects [C, S, S]");
    int c = s[0];
    std::size_t plane = std::size_t(s[1]) * s[2];
    int n = int(texels.size());
    for (int k : texels)
        if (k < 0 || std::size_t(k) >= plane) throw InvalidInput("gather_texels: index out of range");
    Var<T> out = t.make(Shape{n, c});
    auto& ov = t.vals(out);
    const auto& mv = t.vals(map);
    for (int r = 0; r < n; ++r)
        for (int ch = 0; ch < c; ++ch) ov[std::size_t(r) * c + ch] = mv[ch * plane + texels[r]];
    t.push_backward([&t, map, out, texels, c, plane, n] {
        const auto& g = t.grad(out);
        auto& gm = t.grad(map);
        for (int r = 0; r < n; ++r)
            for (int ch = 0; ch < c; ++ch) gm[ch * plane + texels[r]] += g[std::size_t(r) * c + ch];
    });
    return out;
}

template <typename T>
Var<T> reshape(Tape<T>& t, Var<T> a, const Shape& shape) {
    if (shape.numel() != t.shape(a).numel()) throw InvalidInput("reshape: element count mismatch");
    Var<T> out = t.make(shape);
    auto& ov = t.vals(out);
    const auto& av = t.vals(a);
    std::copy(av.begin(), av.end(), ov.begin());
    t.push_backward([&t, a, out] {
        const auto& g = t.grad(out);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    });
    return out;
}

// ---------------------------------------------------------------------------
// Dense and convolutional layers

/// x [N, I] times w [O, I] transposed, plus optional bias [O].
template <typename T>
Var<T> linear(Tape<T>& t, Var<T> x, Var<T> w, Var<T> bias = {}) {
    const Shape &sx = t.shape(x), &sw = t.shape(w);
    if (sx.ndim != 2 || sw.ndim != 2 || sx[1] != sw[1])
        throw InvalidInput("linear: shape mismatch");
    int n = sx[0], in = sx[1], out_dim = sw[0];
    if (bias.valid() && (t.shape(bias).ndim != 1 || t.shape(bias)[0] != out_dim))
        throw InvalidInput("linear: bias shape mismatch");
    Var<T> out = t.make(Shape{n, out_dim});
    auto& ov = t.vals(out);
    const auto &xv = t.vals(x), &wv = t.vals(w);
    for (int r = 0; r < n; ++r) {
        const T* xr = &xv[std::size_t(r) * in];
        T* orow = &ov[std::size_t(r) * out_dim];
        for (int o = 0; o < out_dim; ++o) {
            const T* wr = &wv[std::size_t(o) * in];
            T acc = bias.valid() ? t.vals(bias)[o] : T(0);
            for (int i = 0; i < in; ++i) acc += xr[i] * wr[i];
            orow[o] = acc;
        }
    }
    t.push_backward([&t, x, w, bias, out, n, in, out_dim] {
        const auto& g = t.grad(out);
        const auto &xv = t.vals(x), &wv = t.vals(w);
        auto &gx = t.grad(x), &gw = t.grad(w);
        for (int r = 0; r < n; ++r) {
            const T* gr = &g[std::size_t(r) * out_dim];
            const T* xr = &xv[std::size_t(r) * in];
            T* gxr = &gx[std::size_t(r) * in];
            for (int o = 0; o < out_dim; ++o) {
                T go = gr[o];
                if (go == T(0)) continue;
                const T* wr = &wv[std::size_t(o) * in];
                T* gwr = &gw[std::size_t(o) * in];
                for (int i = 0; i < in; ++i) {
                    gxr[i] += go * wr[i];
                    gwr[i] += go * xr[i];
                }
            }
        }
        if (bias.valid()) {
            auto& gb = t.grad(bias);
            for (int r = 0; r < n; ++r)
                for (int o = 0; o < out_dim; ++o) gb[o] += g[std::size_t(r) * out_dim + o];
        }
    });
    return out;
}

namespace detail {

// Output rows y' for which y' * stride + k - pad lands in [0, extent).
inline void conv_range(int k, int pad, int stride, int extent, int out_extent, int* lo, int* hi) {
    int a = pad - k;
    *lo = a <= 0 ? 0 : (a + stride - 1) / stride;
    int b = extent - 1 + pad - k;
    *hi = b < 0 ? -1 : b / stride;
    if (*hi > out_extent - 1) *hi = out_extent - 1;
}

}  // namespace detail

/// Convolution of x [Ci, H, W] with w [Co, Ci, k, k]; bias is separate so
/// untied (per-pixel) biases stay a plain add.
template <typename T>
Var<T> conv2d(Tape<T>& t, Var<T> x, Var<T> w, int stride, int pad) {
    const Shape &sx = t.shape(x), &sw = t.shape(w);
    if (sx.ndim != 3 || sw.ndim != 4 || sw[1] != sx[0] || sw[2] != sw[3])
        throw InvalidInput("conv2d: shape mismatch");
    int ci = sx[0], h = sx[1], wd = sx[2];
    int co = sw[0], k = sw[2];
    int oh = (h + 2 * pad - k) / stride + 1;
    int ow = (wd + 2 * pad - k) / stride + 1;
    if (oh < 1 || ow < 1) throw InvalidInput("conv2d: output collapses");
    Var<T> out = t.make(Shape{co, oh, ow});
    auto& ov = t.vals(out);
    const auto &xv = t.vals(x), &wv = t.vals(w);

    for (int o = 0; o < co; ++o) {
        T* oplane = &ov[std::size_t(o) * oh * ow];
        for (int c = 0; c < ci; ++c) {
            const T* xplane = &xv[std::size_t(c) * h * wd];
            const T* wk = &wv[(std::size_t(o) * ci + c) * k * k];
            for (int ky = 0; ky < k; ++ky) {
                int ylo, yhi;
                detail::conv_range(ky, pad, stride, h, oh, &ylo, &yhi);
                for (int kx = 0; kx < k; ++kx) {
                    T wval = wk[ky * k + kx];
                    int xlo, xhi;
                    detail::conv_range(kx, pad, stride, wd, ow, &xlo, &xhi);
                    for (int oy = ylo; oy <= yhi; ++oy) {
                        const T* xrow = xplane + std::size_t(oy * stride + ky - pad) * wd;
                        T* orow = oplane + std::size_t(oy) * ow;
                        for (int ox = xlo; ox <= xhi; ++ox)
                            orow[ox] += wval * xrow[ox * stride + kx - pad];
                    }
                }
            }
        }
    }

    t.push_backward([&t, x, w, out, ci, h, wd, co, k, oh, ow, stride, pad] {
        const auto& g = t.grad(out);
        const auto &xv = t.vals(x), &wv = t.vals(w);
        auto &gx = t.grad(x), &gw = t.grad(w);
        for (int o = 0; o < co; ++o) {
            const T* gplane = &g[std::size_t(o) * oh * ow];
            for (int c = 0; c < ci; ++c) {
                const T* xplane = &xv[std::size_t(c) * h * wd];
                T* gxplane = &gx[std::size_t(c) * h * wd];
                const T* wk = &wv[(std::size_t(o) * ci + c) * k * k];
                T* gwk = &gw[(std::size_t(o) * ci + c) * k * k];
                for (int ky = 0; ky < k; ++ky) {
                    int ylo, yhi;
                    detail::conv_range(ky, pad, stride, h, oh, &ylo, &yhi);
                    for (int kx = 0; kx < k; ++kx) {
                        T wval = wk[ky * k + kx];
                        T wacc = 0;
                        int xlo, xhi;
                        detail::conv_range(kx, pad, stride, wd, ow, &xlo, &xhi);
                        for (int oy = ylo; oy <= yhi; ++oy) {
                            const T* grow = gplane + std::size_t(oy) * ow;
                            const T* xrow = xplane + std::size_t(oy * stride + ky - pad) * wd;
                            T* gxrow = gxplane + std::size_t(oy * stride + ky - pad) * wd;
                            for (int ox = xlo; ox <= xhi; ++ox) {
                                T go = grow[ox];
                                gxrow[ox * stride + kx - pad] += wval * go;
                                wacc += xrow[ox * stride + kx - pad] * go;
                            }
                        }
                        gwk[ky * k + kx] += wacc;
                    }
                }
            }
        }
    });
    return out;
}

/// Transposed convolution of x [Ci, H, W] with w [Ci, Co, k, k]; the output
/// is [(Co), (H-1)*stride - 2*pad + k, ...]. Bias is separate, as in conv2d.
template <typename T>
Var<T> tconv2d(Tape<T>& t, Var<T> x, Var<T> w, int stride, int pad) {
    const Shape &sx = t.shape(x), &sw = t.shape(w);
    if (sx.ndim != 3 || sw.ndim != 4 || sw[0] != sx[0] || sw[2] != sw[3])
        throw InvalidInput("tconv2d: shape mismatch");
    int ci = sx[0], h = sx[1], wd = sx[2];
    int co = sw[1], k = sw[2];
    int oh = (h - 1) * stride - 2 * pad + k;
    int ow = (wd - 1) * stride - 2 * pad + k;
    if (oh < 1 || ow < 1) throw InvalidInput("tconv2d: output collapses");
    Var<T> out = t.make(Shape{co, oh, ow});
    auto& ov = t.vals(out);
    const auto &xv = t.vals(x), &wv = t.vals(w);

    // Forward scatters: input pixel (y, x) adds into output rows
    // y * stride - pad + ky. The roles of conv2d's gather loops swap.
    for (int c = 0; c < ci; ++c) {
        const T* xplane = &xv[std::size_t(c) * h * wd];
        for (int o = 0; o < co; ++o) {
            T* oplane = &ov[std::size_t(o) * oh * ow];
            const T* wk = &wv[(std::size_t(c) * co + o) * k * k];
            for (int ky = 0; ky < k; ++ky) {
                int ylo, yhi;
                detail::conv_range(ky, pad, stride, oh, h, &ylo, &yhi);
                for (int kx = 0; kx < k; ++kx) {
                    T wval = wk[ky * k + kx];
                    int xlo, xhi;
                    detail::conv_range(kx, pad, stride, ow, wd, &xlo, &xhi);
                    for (int iy = ylo; iy <= yhi; ++iy) {
                        const T* xrow = xplane + std::size_t(iy) * wd;
                        T* orow = oplane + std::size_t(iy * stride + ky - pad) * ow;
                        for (int ix = xlo; ix <= xhi; ++ix)
                            orow[ix * stride + kx - pad] += wval * xrow[ix];
                    }
                }
            }
        }
    }

    t.push_backward([&t, x, w, out, ci, h, wd, co, k, oh, ow, stride, pad] {
        const auto& g = t.grad(out);
        const auto &xv = t.vals(x), &wv = t.vals(w);
        auto &gx = t.grad(x), &gw = t.grad(w);
        for (int c = 0; c < ci; ++c) {
            const T* xplane = &xv[std::size_t(c) * h * wd];
            T* gxplane = &gx[std::size_t(c) * h * wd];
            for (int o = 0; o < co; ++o) {
                const T* gplane = &g[std::size_t(o) * oh * ow];
                const T* wk = &wv[(std::size_t(c) * co + o) * k * k];
                T* gwk = &gw[(std::size_t(c) * co + o) * k * k];
                for (int ky = 0; ky < k; ++ky) {
                    int ylo, yhi;
                    detail::conv_range(ky, pad, stride, oh, h, &ylo, &yhi);
                    for (int kx = 0; kx < k; ++kx) {
                        T wval = wk[ky * k + kx];
                        T wacc = 0;
                        int xlo, xhi;
                        detail::conv_range(kx, pad, stride, ow, wd, &xlo, &xhi);
                        for (int iy = ylo; iy <= yhi; ++iy) {
                            const T* xrow = xplane + std::size_t(iy) * wd;
                            T* gxrow = gxplane + std::size_t(iy) * wd;
                            const T* grow = gplane + std::size_t(iy * stride + ky - pad) * ow;
                            for (int ix = xlo; ix <= xhi; ++ix) {
                                T go = grow[ix * stride + kx - pad];
                                gxrow[ix] += wval * go;
                                wacc += xrow[ix] * go;
                            }
                        }
                        gwk[ky * k + kx] += wacc;
                    }
                }
            }
        }
    });
    return out;
}

/// Per-channel valid correlation with one fixed (non-learned) square kernel.
template <typename T>
Var<T> depthwise_valid(Tape<T>& t, Var<T> x, const std::vector<T>& kernel, int k) {
    const Shape& s = t.shape(x);
    if (s.ndim != 3 || int(kernel.size()) != k * k)
        throw InvalidInput("depthwise_valid: shape mismatch");
    int c = s[0], h = s[1], w = s[2];
    int oh = h - k + 1, ow = w - k + 1;
    if (oh < 1 || ow < 1) throw InvalidInput("depthwise_valid: kernel larger than input");
    Var<T> out = t.make(Shape{c, oh, ow});
    auto& ov = t.vals(out);
    const auto& xv = t.vals(x);
    for (int ch = 0; ch < c; ++ch) {
        const T* xplane = &xv[std::size_t(ch) * h * w];
        T* oplane = &ov[std::size_t(ch) * oh * ow];
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                T kv = kernel[ky * k + kx];
                for (int y = 0; y < oh; ++y) {
                    const T* xrow = xplane + std::size_t(y + ky) * w + kx;
                    T* orow = oplane + std::size_t(y) * ow;
                    for (int xo = 0; xo < ow; ++xo) orow[xo] += kv * xrow[xo];
                }
            }
    }
    t.push_backward([&t, x, out, kernel, k, c, h, w, oh, ow] {
        const auto& g = t.grad(out);
        auto& gx = t.grad(x);
        for (int ch = 0; ch < c; ++ch) {
            T* gxplane = &gx[std::size_t(ch) * h * w];
            const T* gplane = &g[std::size_t(ch) * oh * ow];
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    T kv = kernel[ky * k + kx];
                    for (int y = 0; y < oh; ++y) {
                        T* gxrow = gxplane + std::size_t(y + ky) * w + kx;
                        const T* grow = gplane + std::size_t(y) * ow;
                        for (int xo = 0; xo < ow; ++xo) gxrow[xo] += kv * grow[xo];
                    }
                }
        }
    });
    return out;
}

}  // namespace relit

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "relit/errors.hpp"
#include "relit/neural/autodiff.hpp"
#include "relit/neural/ops.hpp"
#include "relit/shading/brdf.hpp"

namespace relit::shading {

/// Differentiable batched counterpart of shadowing_g1 over [N] inputs.
/// Saturated regions (below horizon, past the rational cutover, or at the
/// unit clamp) pass zero gradient.
template <typename T>
Var<T> shadowing_g1_op(Tape<T>& t, Var<T> cos_theta, Var<T> width) {
    const Shape s = t.shape(cos_theta);
    if (s.ndim != 1 || t.shape(width) != s)
        throw InvalidInput("shadowing_g1_op: expects matching [N]");
    Var<T> out = t.make(s);
    auto& ov = t.vals(out);
    const auto &cv = t.vals(cos_theta), &wv = t.vals(width);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = shadowing_g1(cv[i], wv[i]);
    t.push_backward([&t, cos_theta, width, out] {
        const auto& g = t.grad(out);
        const auto &cv = t.vals(cos_theta), &wv = t.vals(width);
        auto &gc = t.grad(cos_theta), &gw = t.grad(width);
        for (std::size_t i = 0; i < g.size(); ++i) {
            T c = cv[i], w = wv[i];
            if (c <= T(0) || c >= T(1)) continue;
            T sin2 = T(1) - c * c;
            T sin_theta = std::sqrt(sin2);
            T a = c / (w * sin_theta);
            if (a >= T(1.6)) continue;
            T p = T(3.535) * a + T(2.181) * a * a;
            T q = T(1) + T(2.276) * a + T(2.577) * a * a;
            if (p >= q) continue;
            T dr = ((T(3.535) + T(4.362) * a) * q - p * (T(2.276) + T(5.154) * a)) / (q * q);
            T da_dc = T(1) / (w * sin2 * sin_theta);
            gc[i] += g[i] * dr * da_dc;
            gw[i] += g[i] * dr * (-a / w);
        }
    });
    return out;
}

/// Per-texel glossy radiance weight fs * max(n . wi, 0) for one emitter, as
/// a graph over the shading normal [N, 3], roughness [N], and intensity gain
/// [N]. Light and view directions enter as constants, so gradients flow
/// through the material heads only; multiplying by the emitter's falloff
/// radiance is left to the caller.
template <typename T>
Var<T> specular_weight_graph(Tape<T>& t, Var<T> normal, Var<T> rough, Var<T> gain,
                             const std::vector<T>& wi, const std::vector<T>& wo,
                             T f0 = T(kDefaultF0)) {
    const Shape sn = t.shape(normal);
    if (sn.ndim != 2 || sn[1] != 3)
        throw InvalidInput("specular_weight_graph: normal expects [N, 3]");
    const int n = sn[0];
    if (int(wi.size()) != n * 3 || int(wo.size()) != n * 3)
        throw InvalidInput("specular_weight_graph: direction buffer size mismatch");
    if (t.shape(rough).ndim != 1 || t.shape(rough)[0] != n || t.shape(gain) != t.shape(rough))
        throw InvalidInput("specular_weight_graph: rough and gain expect [N]");

    std::vector<T> hbuf(std::size_t(n) * 3, T(0)), fbuf(n, T(0));
    for (int r = 0; r < n; ++r) {
        Vec3<T> vi{wi[r * 3], wi[r * 3 + 1], wi[r * 3 + 2]};
        Vec3<T> vo{wo[r * 3], wo[r * 3 + 1], wo[r * 3 + 2]};
        Vec3<T> h = vi + vo;
        T hlen = length(h);
        if (hlen < T(1e-8)) continue;
        h = h * (T(1) / hlen);
        hbuf[r * 3] = h.x;
        hbuf[r * 3 + 1] = h.y;
        hbuf[r * 3 + 2] = h.z;
        fbuf[r] = fresnel_schlick(dot(vo, h), f0);
    }
    Var<T> dir_i = t.constant(Shape{n, 3}, wi.data());
    Var<T> dir_o = t.constant(Shape{n, 3}, wo.data());
    Var<T> half = t.constant(Shape{n, 3}, hbuf.data());
    Var<T> fres = t.constant(Shape{n}, fbuf.data());

    Var<T> cos_ni = row_dot(t, normal, dir_i);
    Var<T> cos_no = row_dot(t, normal, dir_o);
    Var<T> cos_nh = row_dot(t, normal, half);

    const T norm_broad = T((kBroadLobeExponent + 2) / (2 * std::numbers::pi));
    const T norm_sharp = T((kSharpLobeExponent + 2) / (2 * std::numbers::pi));
    Var<T> lobe_broad = mul_const(t, powi(t, cos_nh, int(kBroadLobeExponent)), norm_broad);
    Var<T> lobe_sharp = mul_const(t, powi(t, cos_nh, int(kSharpLobeExponent)), norm_sharp);
    Var<T> density = add(t, mul(t, rough, lobe_broad),
                         sub(t, lobe_sharp, mul(t, rough, lobe_sharp)));

    std::vector<T> twos(n, T(2));
    Var<T> exp2 = add_const(t, mul_const(t, rough, T(kBroadLobeExponent - kSharpLobeExponent)),
                            T(kSharpLobeExponent + 2));
    Var<T> width = sqrt_shifted(t, div(t, t.constant(Shape{n}, twos.data()), exp2), T(0));
    Var<T> shadow = mul(t, shadowing_g1_op(t, cos_no, width), shadowing_g1_op(t, cos_ni, width));

    auto guard = [&t](Var<T> c) {
        return add_const(t, relu(t, add_const(t, c, -T(kCosineGuard))), T(kCosineGuard));
    };
    Var<T> denom = mul_const(t, mul(t, guard(cos_no), guard(cos_ni)), T(4));

    Var<T> fs = div(t, mul(t, mul(t, density, shadow), fres), denom);
    return mul(t, mul(t, fs, gain), relu(t, cos_ni));
}

}  // namespace relit::shading

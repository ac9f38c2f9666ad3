// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>

#include "relit/neural/ops.hpp"
#include "relit/neural/param_store.hpp"
#include "relit/rng.hpp"

namespace relit {

template <typename T>
void fill_kaiming_uniform(std::vector<T>& w, int fan_in, double gain, Rng& rng) {
    double bound = gain * std::sqrt(3.0 / double(fan_in));
    for (T& v : w) v = T(rng.uniform(-bound, bound));
}

/// Channel layout of the geometry decoder's output map.
namespace geom_channels {
inline constexpr int kOffset = 0;    // 3: position offset in the tangent frame
inline constexpr int kQuat = 3;      // 4: rotation, identity-anchored
inline constexpr int kScale = 7;     // 3: log-bounded scale
inline constexpr int kOpacity = 10;  // 1: pre-sigmoid opacity
inline constexpr int kExpr = 11;     // rest: appearance feature vector
}  // namespace geom_channels

/// Expression-conditioned geometry decoder: one latent vector expands
/// through a dense layer into a coarse feature grid, then stride-2
/// transposed convolutions double the resolution until the texel grid is
/// reached. Biases on every conv layer are untied (one per output cell).
struct GeomDecoderConfig {
    int latent_dim = 109;
    int base_res = 8;
    int base_channels = 256;
    int out_res = 512;
    int expr_features = 32;
    int min_channels = 16;
    double head_gain = 0.01;  // shrinks the last layer so offsets start near zero

    int out_channels() const { return geom_channels::kExpr + expr_features; }
    int num_upsamples() const {
        int n = 0;
        for (int r = base_res; r < out_res; r *= 2) ++n;
        return n;
    }
    int channels_at(int layer) const {  // layer 0 is the dense output
        int c = base_channels;
        for (int i = 0; i < layer; ++i) c = std::max(min_channels, c / 2);
        return layer == num_upsamples() ? out_channels() : c;
    }
};

template <typename T>
class GeomDecoder {
  public:
    GeomDecoder(GeomDecoderConfig cfg, std::string prefix) : cfg_(cfg), prefix_(std::move(prefix)) {
        if (cfg_.base_res < 1 || cfg_.out_res < cfg_.base_res)
            throw InvalidInput("GeomDecoder: bad resolutions");
        int r = cfg_.base_res;
        while (r < cfg_.out_res) r *= 2;
        if (r != cfg_.out_res)
            throw InvalidInput("GeomDecoder: out_res must be base_res times a power of two");
    }

    const GeomDecoderConfig& config() const { return cfg_; }

    void init(ParamStore<T>& store, Rng& rng) const {
        int c0 = cfg_.channels_at(0), r0 = cfg_.base_res;
        auto& lw = store.add(prefix_ + "lin.w", Shape{c0 * r0 * r0, cfg_.latent_dim});
        fill_kaiming_uniform(lw.value, cfg_.latent_dim, std::sqrt(2.0), rng);
        store.add(prefix_ + "lin.b", Shape{c0 * r0 * r0});
        int res = r0;
        for (int i = 0; i < cfg_.num_upsamples(); ++i) {
            int cin = cfg_.channels_at(i), cout = cfg_.channels_at(i + 1);
            res *= 2;
            auto& w = store.add(layer_name(i) + ".w", Shape{cin, cout, 4, 4});
            bool last = i == cfg_.num_upsamples() - 1;
            double gain = std::sqrt(2.0) * (last ? cfg_.head_gain : 1.0);
            fill_kaiming_uniform(w.value, cin * 16, gain, rng);
            store.add(layer_name(i) + ".b", Shape{cout, res, res});
        }
    }

    /// latent is [1, latent_dim]; the result is [out_channels, S, S] raw
    /// (head activations are applied by the caller).
    Var<T> forward(Tape<T>& tape, ParamStore<T>& store, Var<T> latent) const {
        int c0 = cfg_.channels_at(0), r0 = cfg_.base_res;
        Var<T> h = linear(tape, latent, store.feed(tape, prefix_ + "lin.w"),
                          store.feed(tape, prefix_ + "lin.b"));
        h = reshape(tape, h, Shape{c0, r0, r0});
        h = leaky_relu(tape, h, T(0.01));
        for (int i = 0; i < cfg_.num_upsamples(); ++i) {
            h = tconv2d(tape, h, store.feed(tape, layer_name(i) + ".w"), 2, 1);
            h = add(tape, h, store.feed(tape, layer_name(i) + ".b"));
            if (i + 1 < cfg_.num_upsamples()) h = leaky_relu(tape, h, T(0.01));
        }
        return h;
    }

  private:
    std::string layer_name(int i) const { return prefix_ + "up" + std::to_string(i); }

    GeomDecoderConfig cfg_;
    std::string prefix_;
};

/// View-conditioned decoder: the appearance feature map, concatenated with a
/// spatially broadcast linear encoding of the view direction, passes through
/// one stride-2 conv and one stride-2 transposed conv back to full
/// resolution. Output channels: specular gain (1) and normal offset (3).
struct ViewDecoderConfig {
    int expr_features = 32;
    int view_enc_dim = 8;
    int hidden = 16;
    int res = 512;
    double head_gain = 0.01;

    static constexpr int kGain = 0;
    static constexpr int kNormal = 1;
    int out_channels() const { return 4; }
};

template <typename T>
class ViewDecoder {
  public:
    ViewDecoder(ViewDecoderConfig cfg, std::string prefix) : cfg_(cfg), prefix_(std::move(prefix)) {
        if (cfg_.res % 2 != 0) throw InvalidInput("ViewDecoder: res must be even");
    }

    const ViewDecoderConfig& config() const { return cfg_; }

    void init(ParamStore<T>& store, Rng& rng) const {
        auto& ew = store.add(prefix_ + "venc.w", Shape{cfg_.view_enc_dim, 3});
        fill_kaiming_uniform(ew.value, 3, 1.0, rng);
        store.add(prefix_ + "venc.b", Shape{cfg_.view_enc_dim});
        int cin = cfg_.expr_features + cfg_.view_enc_dim;
        auto& dw = store.add(prefix_ + "down.w", Shape{cfg_.hidden, cin, 4, 4});
        fill_kaiming_uniform(dw.value, cin * 16, std::sqrt(2.0), rng);
        store.add(prefix_ + "down.b", Shape{cfg_.hidden, cfg_.res / 2, cfg_.res / 2});
        auto& uw = store.add(prefix_ + "up.w", Shape{cfg_.hidden, cfg_.out_channels(), 4, 4});
        fill_kaiming_uniform(uw.value, cfg_.hidden * 16, std::sqrt(2.0) * cfg_.head_gain, rng);
        store.add(prefix_ + "up.b", Shape{cfg_.out_channels(), cfg_.res, cfg_.res});
    }

    /// expr_map is [expr_features, S, S], view_dir [1, 3] (unit, world
    /// space). Returns [4, S, S] raw.
    Var<T> forward(Tape<T>& tape, ParamStore<T>& store, Var<T> expr_map, Var<T> view_dir) const {
        const Shape& s = tape.shape(expr_map);
        if (s.ndim != 3 || s[0] != cfg_.expr_features || s[1] != cfg_.res || s[2] != cfg_.res)
            throw InvalidInput("ViewDecoder: expr map shape mismatch");
        Var<T> enc = linear(tape, view_dir, store.feed(tape, prefix_ + "venc.w"),
                            store.feed(tape, prefix_ + "venc.b"));
        enc = reshape(tape, enc, Shape{cfg_.view_enc_dim});
        Var<T> h = concat_channels(tape, expr_map, broadcast_chw(tape, enc, cfg_.res, cfg_.res));
        h = conv2d(tape, h, store.feed(tape, prefix_ + "down.w"), 2, 1);
        h = add(tape, h, store.feed(tape, prefix_ + "down.b"));
        h = leaky_relu(tape, h, T(0.01));
        h = tconv2d(tape, h, store.feed(tape, prefix_ + "up.w"), 2, 1);
        h = add(tape, h, store.feed(tape, prefix_ + "up.b"));
        return h;
    }

  private:
    ViewDecoderConfig cfg_;
    std::string prefix_;
};

/// Diffuse shading head: a small MLP mapping the light's SH projection plus
/// the per-texel appearance feature to one nonnegative reflectance value.
/// Color comes from evaluating it once per channel against that channel's
/// SH coefficients and scaling by the learned albedo.
struct DiffuseMlpConfig {
    int sh_coeffs = 49;  // degree 6
    int expr_features = 32;
    int hidden = 64;

    int in_dim() const { return sh_coeffs + expr_features; }
};

template <typename T>
class DiffuseMlp {
  public:
    DiffuseMlp(DiffuseMlpConfig cfg, std::string prefix) : cfg_(cfg), prefix_(std::move(prefix)) {}

    const DiffuseMlpConfig& config() const { return cfg_; }

    void init(ParamStore<T>& store, Rng& rng) const {
        int dims[4] = {cfg_.in_dim(), cfg_.hidden, cfg_.hidden, 1};
        for (int i = 0; i < 3; ++i) {
            auto& w = store.add(layer_name(i) + ".w", Shape{dims[i + 1], dims[i]});
            fill_kaiming_uniform(w.value, dims[i], std::sqrt(2.0), rng);
            store.add(layer_name(i) + ".b", Shape{dims[i + 1]});
        }
    }

    /// x is [N, sh_coeffs + expr_features]; returns [N, 1] >= 0.
    Var<T> forward(Tape<T>& tape, ParamStore<T>& store, Var<T> x) const {
        Var<T> h = x;
        for (int i = 0; i < 3; ++i) {
            h = linear(tape, h, store.feed(tape, layer_name(i) + ".w"),
                       store.feed(tape, layer_name(i) + ".b"));
            if (i < 2) h = leaky_relu(tape, h, T(0.01));
        }
        return softplus(tape, h);
    }

  private:
    std::string layer_name(int i) const { return prefix_ + "l" + std::to_string(i); }

    DiffuseMlpConfig cfg_;
    std::string prefix_;
};

}  // namespace relit

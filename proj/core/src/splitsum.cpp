// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/envlight/splitsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relit/errors.hpp"
#include "relit/parallel.hpp"
#include "relit/rng.hpp"

namespace relit::envlight {

namespace {

constexpr double kPi = std::numbers::pi;

/// Right-handed orthonormal basis with `n` as the third column.
Mat3d basis_around(const Vec3d& n) {
    Vec3d helper = std::abs(n.z) < 0.9 ? Vec3d{0, 0, 1} : Vec3d{1, 0, 0};
    Vec3d t = normalize(cross(helper, n));
    Vec3d b = cross(n, t);
    return Mat3d(t, b, n);
}

/// Half-vector density of the blended lobe over solid angle:
/// p(h) = r (e1+1)/2pi cos^e1 + (1-r) (e2+1)/2pi cos^e2. This is the
/// distribution the sampler below draws from, not the NDF itself (the NDF
/// normalizes against the projected solid angle instead).
double half_vector_pdf(double cos_h, double r) {
    if (cos_h <= 0) return 0;
    double broad = (shading::kBroadLobeExponent + 1.0) / (2.0 * kPi) *
                   std::pow(cos_h, shading::kBroadLobeExponent);
    double sharp = (shading::kSharpLobeExponent + 1.0) / (2.0 * kPi) *
                   std::pow(cos_h, shading::kSharpLobeExponent);
    return r * broad + (1.0 - r) * sharp;
}

/// Draws a half vector in the local frame (z up) from the blended lobe.
/// u0 selects the component with probability r and is reused, stratified,
/// inside the chosen branch; u1 sets the azimuth.
Vec3d sample_half_vector(double u0, double u1, double r) {
    double exponent;
    if (u0 < r) {
        exponent = shading::kBroadLobeExponent;
        u0 = r > 0 ? u0 / r : 0.0;
    } else {
        exponent = shading::kSharpLobeExponent;
        u0 = r < 1 ? (u0 - r) / (1.0 - r) : 0.0;
    }
    double cos_h = std::pow(std::min(u0, 0.999999999), 1.0 / (exponent + 1.0));
    double sin_h = std::sqrt(std::max(0.0, 1.0 - cos_h * cos_h));
    double phi = 2.0 * kPi * u1;
    return {sin_h * std::cos(phi), sin_h * std::sin(phi), cos_h};
}

Vec3d reflect_about(const Vec3d& v, const Vec3d& axis) {
    return axis * (2.0 * dot(v, axis)) - v;
}

}  // namespace

Vec2<double> BrdfLut::fetch(double cos_theta, double roughness) const {
    double fx = std::clamp(cos_theta, 0.0, 1.0) * n - 0.5;
    double fy = std::clamp(roughness, 0.0, 1.0) * n - 0.5;
    int x0 = std::clamp(int(std::floor(fx)), 0, n - 1);
    int y0 = std::clamp(int(std::floor(fy)), 0, n - 1);
    int x1 = std::min(x0 + 1, n - 1);
    int y1 = std::min(y0 + 1, n - 1);
    double tx = std::clamp(fx - x0, 0.0, 1.0);
    double ty = std::clamp(fy - y0, 0.0, 1.0);
    auto at = [&](int x, int y, int c) { return double(data[(std::size_t(y) * n + x) * 2 + c]); };
    Vec2<double> out;
    out.x = (1 - ty) * ((1 - tx) * at(x0, y0, 0) + tx * at(x1, y0, 0)) +
            ty * ((1 - tx) * at(x0, y1, 0) + tx * at(x1, y1, 0));
    out.y = (1 - ty) * ((1 - tx) * at(x0, y0, 1) + tx * at(x1, y0, 1)) +
            ty * ((1 - tx) * at(x0, y1, 1) + tx * at(x1, y1, 1));
    return out;
}

PrefilteredEnv prefilter_env(const EnvMap& env, int levels, int samples_per_texel,
                             std::uint64_t seed) {
    if (levels < 2) throw InvalidInput("prefilter_env: need at least 2 levels");
    if (samples_per_texel < 32) throw InvalidInput("prefilter_env: need at least 32 samples");

    PrefilteredEnv pre;
    const Rng base(seed);
    for (int level = 0; level < levels; ++level) {
        int h = std::max(1, env.height() >> level);
        int w = 2 * h;
        Imagef out(w, h, 3);
        double r = double(level) / double(levels - 1);
        parallel_for(std::int64_t(h) * w, [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t t = lo; t < hi; ++t) {
                int x = int(t % w), y = int(t / w);
                Rng rng = base.fork((std::uint64_t(level) << 48) | std::uint64_t(t));
                Vec3d n = texel_direction(x, y, w, h);
                Mat3d frame = basis_around(n);
                Vec3d sum{};
                double weight = 0;
                for (int s = 0; s < samples_per_texel; ++s) {
                    Vec3d hl = sample_half_vector(rng.uniform(), rng.uniform(), r);
                    Vec3d half = frame * hl;
                    Vec3d wi = reflect_about(n, half);
                    double cos_i = dot(n, wi);
                    if (cos_i <= 0) continue;
                    sum += sample_env(env, wi) * cos_i;
                    weight += cos_i;
                }
                Vec3d value = weight > 0 ? sum / weight : sample_env(env, n);
                for (int c = 0; c < 3; ++c) out.at(x, y, c) = float(value[c]);
            }
        });
        pre.levels.push_back(std::move(out));
    }
    return pre;
}

Vec3d sample_prefiltered(const PrefilteredEnv& pre, const Vec3d& dir, double roughness) {
    const int count = pre.level_count();
    if (count == 0) throw InvalidInput("sample_prefiltered: empty chain");
    double level_f = std::clamp(roughness, 0.0, 1.0) * (count - 1);
    int l0 = std::min(int(level_f), count - 1);
    int l1 = std::min(l0 + 1, count - 1);
    double t = level_f - l0;
    Vec3d a = sample_equirect(pre.levels[std::size_t(l0)], dir);
    if (l1 == l0 || t == 0.0) return a;
    Vec3d b = sample_equirect(pre.levels[std::size_t(l1)], dir);
    return a * (1.0 - t) + b * t;
}

BrdfLut precompute_brdf_lut(int n, int samples) {
    if (n < 16) throw InvalidInput("precompute_brdf_lut: grid must be at least 16");
    if (samples < 1) throw InvalidInput("precompute_brdf_lut: need samples");

    BrdfLut lut;
    lut.n = n;
    lut.data.assign(std::size_t(n) * n * 2, 0.0f);
    parallel_for(std::int64_t(n) * n, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t cell = lo; cell < hi; ++cell) {
            const int ci = int(cell % n);  // cos_theta axis
            const int ri = int(cell / n);  // roughness axis
            const double cos_o = (ci + 0.5) / double(n);
            const double r = (ri + 0.5) / double(n);
            const double sin_o = std::sqrt(std::max(0.0, 1.0 - cos_o * cos_o));
            const Vec3d wo{sin_o, 0.0, cos_o};

            double scale = 0, bias = 0;
            for (int s = 0; s < samples; ++s) {
                double u0 = (s + 0.5) / double(samples);
                double u1 = radical_inverse_vdc(std::uint32_t(s));
                Vec3d half = sample_half_vector(u0, u1, r);
                Vec3d wi = reflect_about(wo, half);
                if (wi.z <= 0) continue;
                double cos_oh = dot(wo, half);
                if (cos_oh <= 1e-9) continue;
                double pdf_h = half_vector_pdf(half.z, r);
                if (pdf_h <= 0) continue;
                // fs / F * cos_i / pdf(w_i), with pdf(w_i) = pdf(h) / (4 cos_oh),
                // collapses to D G cos_oh / (cos_o pdf(h)).
                double d = shading::ndf_mix(half.z, r);
                double g = shading::geometry_term(cos_o, wi.z, r);
                double w = d * g * cos_oh / (cos_o * pdf_h);
                double fres = std::pow(1.0 - cos_oh, 5.0);
                scale += w * (1.0 - fres);
                bias += w * fres;
            }
            lut.data[std::size_t(cell) * 2 + 0] = float(scale / samples);
            lut.data[std::size_t(cell) * 2 + 1] = float(bias / samples);
        }
    });
    return lut;
}

Vec3d env_specular(const Vec3d& wo, const Vec3d& normal,
                   const shading::MaterialSample<double>& mat, const PrefilteredEnv& pre,
                   const BrdfLut& lut) {
    double cos_o = dot(wo, normal);
    if (cos_o <= 0) return {};
    Vec3d wr = reflect_about(wo, normal);
    Vec2<double> ab = lut.fetch(cos_o, mat.roughness);
    Vec3d radiance = sample_prefiltered(pre, wr, mat.roughness);
    return radiance * (ab.x * mat.specular + ab.y);
}

McEstimate mc_reference(const EnvMap& env, const Vec3d& wo, const Vec3d& normal,
                        const shading::MaterialSample<double>& mat, int samples,
                        std::uint64_t seed) {
    if (samples < 10000) throw InvalidInput("mc_reference: need at least 1e4 samples");
    Rng rng(seed);
    const Mat3d frame = basis_around(normal);
    const double cos_o = dot(wo, normal);
    const double r = mat.roughness;
    const double f0 = std::clamp(mat.specular, 0.0, 1.0);

    Vec3d sum{}, sum_sq{};
    for (int s = 0; s < samples; ++s) {
        Vec3d hl = sample_half_vector(rng.uniform(), rng.uniform(), r);
        Vec3d half = frame * hl;
        Vec3d wi = reflect_about(wo, half);
        double cos_i = dot(wi, normal);
        double cos_oh = dot(wo, half);
        Vec3d term{};
        if (cos_i > 0 && cos_oh > 1e-9 && cos_o > 0) {
            double cos_nh = dot(normal, half);
            double pdf_h = half_vector_pdf(cos_nh, r);
            if (pdf_h > 0) {
                double d = shading::ndf_mix(cos_nh, r);
                double g = shading::geometry_term(cos_o, cos_i, r);
                double f = shading::fresnel_schlick(cos_oh, f0);
                double w = d * g * f * cos_oh / (cos_o * pdf_h);
                term = sample_env(env, wi) * w;
            }
        }
        sum += term;
        sum_sq += cmul(term, term);
    }
    McEstimate est;
    est.value = sum / double(samples);
    for (int c = 0; c < 3; ++c) {
        double mean = est.value[c];
        double var = std::max(0.0, sum_sq[c] / samples - mean * mean);
        est.std_error[c] = std::sqrt(var / samples);
    }
    return est;
}

}  // namespace relit::envlight

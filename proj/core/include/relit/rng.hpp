// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace relit {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Counter-based generator with a platform-independent bit stream.
/// std::mt19937 plus the standard distributions is avoided on purpose:
/// distribution output is implementation-defined, and seeds here must
/// reproduce files byte for byte.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : state_(seed) {
        // Warm up so that small seeds diverge immediately.
        splitmix64(state_);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    uint32_t next_u32() { return static_cast<uint32_t>(next_u64() >> 32); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no cached spare, keeps state linear).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n ? next_u64() % n : 0; }

    /// Derive an independent stream for a tagged sub-task (texel, layer, ...).
    Rng fork(uint64_t tag) const {
        uint64_t s = state_ ^ (0x632be59bd9b4e019ull * (tag + 1));
        return Rng(s);
    }

private:
    uint64_t state_;
};

/// Van der Corput radical inverse base 2; pairs with i/N for a
/// deterministic low-discrepancy (Hammersley) point set.
inline double radical_inverse_vdc(uint32_t bits) {
    bits = (bits << 16u) | (bits >> 16u);
    bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
    bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
    bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
    bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
    return static_cast<double>(bits) * 2.3283064365386963e-10;  // 2^-32
}

}  // namespace relit

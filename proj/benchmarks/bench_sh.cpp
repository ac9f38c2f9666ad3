// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "relit/core/sh.hpp"
#include "relit/rng.hpp"

namespace {

void BM_ShEval(benchmark::State& state) {
    const int degree = int(state.range(0));
    relit::Rng rng(1);
    relit::Vec3d dir = normalize(relit::Vec3d(rng.normal(), rng.normal(), rng.normal()));
    std::vector<double> out(relit::sh::coeff_count(degree));
    for (auto _ : state) {
        relit::sh::eval(degree, dir, out.data());
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ShEval)->Arg(2)->Arg(6)->Arg(10);

void BM_ShProjectDelta(benchmark::State& state) {
    relit::Rng rng(2);
    std::vector<double> coeffs(relit::sh::coeff_count(6), 0.0);
    relit::Vec3d dir = normalize(relit::Vec3d(rng.normal(), rng.normal(), rng.normal()));
    for (auto _ : state) {
        relit::sh::add_delta(6, dir, 0.5, coeffs.data());
        benchmark::DoNotOptimize(coeffs.data());
    }
}
BENCHMARK(BM_ShProjectDelta);

}  // namespace

BENCHMARK_MAIN();

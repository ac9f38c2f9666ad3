// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "relit/neural/checkpoint.hpp"
#include "relit/neural/networks.hpp"
#include "relit/neural/ops.hpp"

using namespace relit;

TEST_CASE("adam minimizes a quadratic") {
    ParamStore<double> store;
    auto& x = store.add("x", Shape{8});
    Rng rng(1);
    std::vector<double> target(8);
    for (int i = 0; i < 8; ++i) {
        target[i] = rng.uniform(-2.0, 2.0);
        x.value[i] = rng.uniform(-2.0, 2.0);
    }
    AdamConfig adam;
    adam.lr = 0.05;
    for (int it = 0; it < 600; ++it) {
        for (int i = 0; i < 8; ++i) x.grad[i] = x.value[i] - target[i];
        store.adam_step(adam);
    }
    for (int i = 0; i < 8; ++i) CHECK(x.value[i] == doctest::Approx(target[i]).epsilon(1e-3));
    CHECK(store.step() == 600);
}

TEST_CASE("adam bias correction gives a full-size first step") {
    ParamStore<double> store;
    auto& x = store.add("x", Shape{1});
    x.value[0] = 1.0;
    x.grad[0] = 0.5;
    AdamConfig adam;
    adam.lr = 0.1;
    store.adam_step(adam);
    // With bias correction the first update is lr * g / (|g| + eps).
    CHECK(x.value[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-6));
}

TEST_CASE("training a small mlp to regress targets") {
    DiffuseMlpConfig cfg;
    cfg.sh_coeffs = 4;
    cfg.expr_features = 2;
    cfg.hidden = 16;
    ParamStore<double> store;
    Rng rng(2);
    DiffuseMlp<double> mlp(cfg, "m.");
    mlp.init(store, rng);

    const int n = 16;
    std::vector<double> inputs(std::size_t(n) * cfg.in_dim()), targets(n);
    for (double& v : inputs) v = rng.uniform(-1.0, 1.0);
    for (double& v : targets) v = rng.uniform(0.1, 1.5);

    AdamConfig adam;
    adam.lr = 3e-3;
    double first = 0.0, last = 0.0;
    for (int it = 0; it < 800; ++it) {
        Tape<double> tape;
        Var<double> x = tape.constant(Shape{n, cfg.in_dim()}, inputs.data());
        Var<double> y = mlp.forward(tape, store, x);
        Var<double> tgt = tape.constant(Shape{n, 1}, targets.data());
        Var<double> loss = mean(tape, square(tape, sub(tape, y, tgt)));
        if (it == 0) first = tape.vals(loss)[0];
        last = tape.vals(loss)[0];
        tape.backward(loss);
        store.harvest(tape);
        store.adam_step(adam);
    }
    CHECK(last < 0.05 * first);
}

TEST_CASE("checkpoint resume reproduces uninterrupted training") {
    auto make_data = [](std::vector<double>* inputs, std::vector<double>* targets) {
        Rng rng(3);
        inputs->resize(8 * 6);
        targets->resize(8);
        for (double& v : *inputs) v = rng.uniform(-1.0, 1.0);
        for (double& v : *targets) v = rng.uniform(0.2, 1.0);
    };
    DiffuseMlpConfig cfg;
    cfg.sh_coeffs = 4;
    cfg.expr_features = 2;
    cfg.hidden = 8;

    auto step_once = [&](ParamStore<double>& store, const std::vector<double>& inputs,
                         const std::vector<double>& targets) {
        DiffuseMlp<double> mlp(cfg, "m.");
        Tape<double> tape;
        Var<double> x = tape.constant(Shape{8, cfg.in_dim()}, inputs.data());
        Var<double> y = mlp.forward(tape, store, x);
        Var<double> tgt = tape.constant(Shape{8, 1}, targets.data());
        Var<double> loss = mean(tape, square(tape, sub(tape, y, tgt)));
        tape.backward(loss);
        store.harvest(tape);
        AdamConfig adam;
        adam.lr = 1e-2;
        store.adam_step(adam);
    };

    std::vector<double> inputs, targets;
    make_data(&inputs, &targets);

    // Uninterrupted: 10 steps.
    ParamStore<double> full;
    {
        Rng rng(4);
        DiffuseMlp<double>(cfg, "m.").init(full, rng);
    }
    for (int i = 0; i < 10; ++i) step_once(full, inputs, targets);

    // Interrupted: 5 steps, save, reload, 5 more.
    ParamStore<double> half;
    {
        Rng rng(4);
        DiffuseMlp<double>(cfg, "m.").init(half, rng);
    }
    for (int i = 0; i < 5; ++i) step_once(half, inputs, targets);
    write_checkpoint("tmp_resume.bin", pack_param_store(half));
    ParamStore<double> resumed;
    unpack_param_store(read_checkpoint("tmp_resume.bin"), &resumed);
    CHECK(resumed.step() == 5);
    for (int i = 0; i < 5; ++i) step_once(resumed, inputs, targets);
    std::remove("tmp_resume.bin");

    for (const auto& [name, e] : full.entries()) {
        const auto& r = resumed.at(name);
        for (std::size_t i = 0; i < e.value.size(); ++i)
            CHECK(r.value[i] == doctest::Approx(e.value[i]).epsilon(1e-14));
    }
}

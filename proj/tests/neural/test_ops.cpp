// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include <functional>
#include <vector>

#include "doctest.h"
#include "relit/core/quat.hpp"
#include "relit/neural/gradcheck.hpp"
#include "relit/neural/ops.hpp"
#include "relit/rng.hpp"

using namespace relit;

namespace {

using D = double;
using Builder = std::function<Var<D>(Tape<D>&, Var<D>)>;

double eval_graph(const Builder& build, const Shape& in_shape, const std::vector<D>& x,
                  std::vector<D>* grad) {
    Tape<D> tape;
    Var<D> in = tape.constant(in_shape, x.data());
    Var<D> loss = build(tape, in);
    double value = tape.vals(loss)[0];
    if (grad) {
        tape.backward(loss);
        *grad = tape.grad(in);
    }
    return value;
}

// Projects a tensor to a scalar with fixed pseudo-random weights so every
// output element influences the loss.
Var<D> project_scalar(Tape<D>& t, Var<D> v, std::uint64_t seed = 99) {
    Rng rng(seed);
    std::vector<D> w(std::size_t(t.shape(v).numel()));
    for (D& x : w) x = rng.uniform(-1.0, 1.0);
    Var<D> proj = t.constant(t.shape(v), w.data());
    return sum(t, mul(t, v, proj));
}

void expect_grads_ok(const char* label, const Builder& build, const Shape& in_shape, double lo,
                     double hi, std::uint64_t seed, double tol = 1e-7) {
    Rng rng(seed);
    std::vector<D> x(std::size_t(in_shape.numel()));
    for (D& v : x) v = rng.uniform(lo, hi);
    auto fn = [&](const std::vector<D>& xs, std::vector<D>* g) {
        return eval_graph(build, in_shape, xs, g);
    };
    GradCheckReport rep = check_gradients(fn, x, 1e-5);
    INFO(label, ": worst coord ", rep.worst_index, " analytic ", rep.worst_analytic, " numeric ",
         rep.worst_numeric);
    CHECK(rep.max_rel < tol);
}

Var<D> make_const(Tape<D>& t, const Shape& s, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    std::vector<D> v(std::size_t(s.numel()));
    for (D& x : v) x = rng.uniform(lo, hi);
    return t.constant(s, v.data());
}

}  // namespace

TEST_CASE("gradients: elementwise binary ops") {
    Shape s{3, 4};
    expect_grads_ok("add lhs", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, add(t, in, make_const(t, s, 1, -1, 1)));
    }, s, -1, 1, 10);
    expect_grads_ok("sub rhs", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, sub(t, make_const(t, s, 2, -1, 1), in));
    }, s, -1, 1, 11);
    expect_grads_ok("mul lhs", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, mul(t, in, make_const(t, s, 3, -2, 2)));
    }, s, -1, 1, 12);
    expect_grads_ok("mul both", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, mul(t, in, in));
    }, s, -1, 1, 13);
    expect_grads_ok("div num", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, div(t, in, make_const(t, s, 4, 0.5, 1.5)));
    }, s, -1, 1, 14);
    expect_grads_ok("div den", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, div(t, make_const(t, s, 5, -1, 1), in));
    }, s, 0.5, 1.5, 15);
}

TEST_CASE("gradients: scalar-argument and unary ops") {
    Shape s{2, 5};
    expect_grads_ok("mul_const", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, mul_const(t, in, 3.7));
    }, s, -1, 1, 20);
    expect_grads_ok("add_const", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, add_const(t, in, -0.4));
    }, s, -1, 1, 21);
    expect_grads_ok("square", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, square(t, in));
    }, s, -1, 1, 22);
    expect_grads_ok("abs", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, abs_val(t, in));
    }, s, 0.2, 1.0, 23);
    expect_grads_ok("exp", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, exp_val(t, in));
    }, s, -1, 1, 24);
    expect_grads_ok("sqrt_shifted", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, sqrt_shifted(t, in, 1e-3));
    }, s, 0.1, 2.0, 25);
    expect_grads_ok("leaky_relu", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, leaky_relu(t, in, 0.01));
    }, s, 0.2, 1.0, 26);
    expect_grads_ok("leaky_relu negative side", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, leaky_relu(t, in, 0.01));
    }, s, -1.0, -0.2, 27);
    expect_grads_ok("sigmoid", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, sigmoid(t, in));
    }, s, -3, 3, 28);
    expect_grads_ok("softplus", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, softplus(t, in));
    }, s, -3, 3, 29);
}

TEST_CASE("gradients: reductions and row ops") {
    expect_grads_ok("mean", [&](Tape<D>& t, Var<D> in) { return mean(t, square(t, in)); },
                    Shape{4, 3}, -1, 1, 30);
    expect_grads_ok("row_norm", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, row_norm(t, in, 1e-8));
    }, Shape{5, 3}, 0.2, 1.0, 31);
    expect_grads_ok("normalize_rows", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, normalize_rows(t, in, 1e-12));
    }, Shape{5, 4}, 0.3, 1.0, 32);
    expect_grads_ok("tile_rows", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, tile_rows(t, in, 6));
    }, Shape{7}, -1, 1, 33);
    expect_grads_ok("row_dot lhs", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, row_dot(t, in, make_const(t, Shape{5, 3}, 8, -1, 1)));
    }, Shape{5, 3}, -1, 1, 34);
    expect_grads_ok("row_dot both", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, row_dot(t, in, in));
    }, Shape{4, 3}, -1, 1, 35);
    expect_grads_ok("scale_rows matrix", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, scale_rows(t, in, make_const(t, Shape{6}, 9, -1, 1)));
    }, Shape{6, 3}, -1, 1, 36);
    expect_grads_ok("scale_rows scales", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, scale_rows(t, make_const(t, Shape{6, 3}, 12, -1, 1), in));
    }, Shape{6}, -1, 1, 37);
    expect_grads_ok("powi cubic", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, powi(t, in, 3));
    }, Shape{3, 4}, 0.2, 1.2, 38);
    expect_grads_ok("powi high even", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, powi(t, in, 12));
    }, Shape{3, 4}, 0.4, 1.0, 39);
}

TEST_CASE("powi clamps the negative domain to zero") {
    Tape<D> t;
    std::vector<D> xs = {-0.5, 0.0, 0.5};
    Var<D> in = t.constant(Shape{3}, xs.data());
    Var<D> out = powi(t, in, 3);
    CHECK(t.vals(out)[0] == 0.0);
    CHECK(t.vals(out)[1] == 0.0);
    CHECK(t.vals(out)[2] == doctest::Approx(0.125));
    Var<D> loss = sum(t, out);
    t.backward(loss);
    CHECK(t.grad(in)[0] == 0.0);
    CHECK(t.grad(in)[2] == doctest::Approx(0.75));
}

TEST_CASE("gradients: structure ops") {
    expect_grads_ok("concat_cols", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, concat_cols(t, in, make_const(t, Shape{4, 2}, 6, -1, 1)));
    }, Shape{4, 3}, -1, 1, 40);
    expect_grads_ok("slice_cols", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, slice_cols(t, in, 1, 4));
    }, Shape{3, 5}, -1, 1, 41);
    expect_grads_ok("concat_channels", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, concat_channels(t, in, make_const(t, Shape{2, 3, 3}, 7, -1, 1)));
    }, Shape{2, 3, 3}, -1, 1, 42);
    expect_grads_ok("slice_channels", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, slice_channels(t, in, 1, 3));
    }, Shape{4, 3, 3}, -1, 1, 43);
    expect_grads_ok("broadcast_chw", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, broadcast_chw(t, in, 4, 5));
    }, Shape{3}, -1, 1, 44);
    expect_grads_ok("reshape", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, reshape(t, in, Shape{6, 2}));
    }, Shape{3, 4}, -1, 1, 45);
    std::vector<int> texels = {0, 5, 5, 8};  // repeats exercise scatter-add
    expect_grads_ok("gather_texels", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, gather_texels(t, in, texels));
    }, Shape{2, 3, 3}, -1, 1, 46);
    std::vector<Mat3<D>> rots;
    {
        Rng rr(47);
        for (int i = 0; i < 5; ++i) {
            Vec3<D> axis{rr.uniform(-1.0, 1.0), rr.uniform(-1.0, 1.0), rr.uniform(-1.0, 1.0)};
            rots.push_back(Quat<D>::axis_angle(normalize(axis), rr.uniform(0.0, 3.0)).to_matrix());
        }
    }
    expect_grads_ok("rotate_rows", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, rotate_rows(t, in, rots));
    }, Shape{5, 3}, -1, 1, 48);
}

TEST_CASE("gradients: dense and conv layers") {
    Shape xs{3, 5}, ws{4, 5}, bs{4};
    expect_grads_ok("linear wrt x", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, linear(t, in, make_const(t, ws, 8, -1, 1),
                                        make_const(t, bs, 9, -1, 1)));
    }, xs, -1, 1, 50);
    expect_grads_ok("linear wrt w", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, linear(t, make_const(t, xs, 10, -1, 1), in,
                                        make_const(t, bs, 11, -1, 1)));
    }, ws, -1, 1, 51);
    expect_grads_ok("linear wrt b", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, linear(t, make_const(t, xs, 12, -1, 1),
                                        make_const(t, ws, 13, -1, 1), in));
    }, bs, -1, 1, 52);

    Shape cx{2, 6, 6}, cw{3, 2, 4, 4};
    expect_grads_ok("conv2d wrt x", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, conv2d(t, in, make_const(t, cw, 14, -1, 1), 2, 1));
    }, cx, -1, 1, 53);
    expect_grads_ok("conv2d wrt w", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, conv2d(t, make_const(t, cx, 15, -1, 1), in, 2, 1));
    }, cw, -1, 1, 54);

    Shape tx{3, 4, 4}, tw{3, 2, 4, 4};
    expect_grads_ok("tconv2d wrt x", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, tconv2d(t, in, make_const(t, tw, 16, -1, 1), 2, 1));
    }, tx, -1, 1, 55);
    expect_grads_ok("tconv2d wrt w", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, tconv2d(t, make_const(t, tx, 17, -1, 1), in, 2, 1));
    }, tw, -1, 1, 56);

    std::vector<D> kernel = {0.1, 0.2, 0.3, -0.4, 0.5, -0.6, 0.7, 0.8, -0.9};
    expect_grads_ok("depthwise_valid", [&](Tape<D>& t, Var<D> in) {
        return project_scalar(t, depthwise_valid(t, in, kernel, 3));
    }, Shape{2, 5, 5}, -1, 1, 57);
}

TEST_CASE("conv2d matches a hand-computed case") {
    // 1x3x3 input, 1x1x2x2 kernel, stride 1, no padding.
    Tape<D> t;
    std::vector<D> xv = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<D> wv = {1, 0, 0, -1};
    Var<D> x = t.constant(Shape{1, 3, 3}, xv.data());
    Var<D> w = t.constant(Shape{1, 1, 2, 2}, wv.data());
    Var<D> y = conv2d(t, x, w, 1, 0);
    REQUIRE(t.shape(y) == Shape{1, 2, 2});
    // Correlation: out(y,x) = in(y,x) - in(y+1,x+1).
    CHECK(t.vals(y)[0] == doctest::Approx(1 - 5));
    CHECK(t.vals(y)[1] == doctest::Approx(2 - 6));
    CHECK(t.vals(y)[2] == doctest::Approx(4 - 8));
    CHECK(t.vals(y)[3] == doctest::Approx(5 - 9));
}

TEST_CASE("stride-2 conv and tconv shapes halve and double") {
    Tape<D> t;
    std::vector<D> xv(std::size_t(3) * 8 * 8, 0.5);
    Var<D> x = t.constant(Shape{3, 8, 8}, xv.data());
    std::vector<D> wv(std::size_t(5) * 3 * 16, 0.1);
    Var<D> y = conv2d(t, x, t.constant(Shape{5, 3, 4, 4}, wv.data()), 2, 1);
    CHECK(t.shape(y) == Shape{5, 4, 4});
    std::vector<D> uv(std::size_t(5) * 2 * 16, 0.1);
    Var<D> z = tconv2d(t, y, t.constant(Shape{5, 2, 4, 4}, uv.data()), 2, 1);
    CHECK(t.shape(z) == Shape{2, 8, 8});
}

TEST_CASE("tconv2d matches the conv2d adjoint") {
    // <conv(x), y> == <x, tconv(y)> when both use the same kernel, which
    // pins the scatter indexing against the gather indexing.
    Rng rng(77);
    Shape xs{2, 6, 6}, ys{3, 3, 3}, ws{3, 2, 4, 4};
    std::vector<D> xv(std::size_t(xs.numel())), yv(std::size_t(ys.numel())),
        wv(std::size_t(ws.numel()));
    for (D& v : xv) v = rng.uniform(-1, 1);
    for (D& v : yv) v = rng.uniform(-1, 1);
    for (D& v : wv) v = rng.uniform(-1, 1);

    Tape<D> t;
    Var<D> x = t.constant(xs, xv.data());
    Var<D> w = t.constant(ws, wv.data());
    Var<D> conv_x = conv2d(t, x, w, 2, 1);
    REQUIRE(t.shape(conv_x) == ys);

    // tconv wants [Ci(out side of conv), Co, k, k]; conv used [Co, Ci, k, k].
    std::vector<D> wt(wv.size());
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < 16; ++k) wt[(a * 2 + b) * 16 + k] = wv[(a * 2 + b) * 16 + k];
    Var<D> y = t.constant(ys, yv.data());
    Var<D> tconv_y = tconv2d(t, y, t.constant(ws, wt.data()), 2, 1);
    REQUIRE(t.shape(tconv_y) == xs);

    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < yv.size(); ++i) lhs += t.vals(conv_x)[i] * yv[i];
    for (std::size_t i = 0; i < xv.size(); ++i) rhs += xv[i] * t.vals(tconv_y)[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("gradients: composite network block") {
    // linear -> leaky -> linear -> sigmoid -> mse against a fixed target.
    Shape in_shape{4, 6};
    expect_grads_ok("mlp block", [&](Tape<D>& t, Var<D> in) {
        Var<D> w0 = make_const(t, Shape{8, 6}, 101, -0.5, 0.5);
        Var<D> b0 = make_const(t, Shape{8}, 102, -0.1, 0.1);
        Var<D> w1 = make_const(t, Shape{3, 8}, 103, -0.5, 0.5);
        Var<D> b1 = make_const(t, Shape{3}, 104, -0.1, 0.1);
        Var<D> target = make_const(t, Shape{4, 3}, 105, 0.2, 0.8);
        Var<D> h = leaky_relu(t, linear(t, in, w0, b0), 0.01);
        Var<D> out = sigmoid(t, linear(t, h, w1, b1));
        return mean(t, square(t, sub(t, out, target)));
    }, in_shape, -1, 1, 60, 1e-6);
}

// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "relit/core/vec.hpp"

namespace relit::sh {

/// Highest supported band. Lighting uses degree 6; tests sweep higher bands.
inline constexpr int kMaxDegree = 10;

constexpr int coeff_count(int degree) { return (degree + 1) * (degree + 1); }

/// Flat index of the (l, m) basis function, m in [-l, l].
constexpr int index(int l, int m) { return l * (l + 1) + m; }

/// Evaluates all real SH basis functions up to `degree` at a unit direction.
/// `out` must hold coeff_count(degree) values, ordered by index(l, m).
void eval(int degree, const Vec3d& dir, double* out);

std::vector<double> eval(int degree, const Vec3d& dir);

/// Single-precision wrapper; evaluation still runs in double internally.
void eval(int degree, const Vec3f& dir, float* out);

/// Sum of coeffs[i] * Y_i(dir).
double reconstruct(const std::vector<double>& coeffs, const Vec3d& dir);

/// i-th of n spiral points on the unit sphere, evenly spread.
Vec3d fibonacci_dir(int i, int n);

/// Projects a spherical function onto SH by quadrature over `n_samples`
/// spiral points. Exact only in the limit; tests use band-limited inputs
/// where a few thousand samples suffice.
std::vector<double> project(int degree, const std::function<double(const Vec3d&)>& f,
                            int n_samples);

/// Adds weight * Y(dir) to coeffs, the projection of a directional delta.
void add_delta(int degree, const Vec3d& dir, double weight, double* coeffs);

/// Applies a rotation to an SH coefficient vector: the result represents
/// f(R^T w) when coeffs represent f(w). Per-band exact; coeffs length must
/// be a full band count.
std::vector<double> rotate(const std::vector<double>& coeffs, const Mat3d& rot);

/// Sum of squared coefficients per band l.
std::vector<double> band_energy(const std::vector<double>& coeffs);

}  // namespace relit::sh

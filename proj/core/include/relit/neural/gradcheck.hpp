// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "relit/errors.hpp"
#include "relit/rng.hpp"

namespace relit {

/// Loss with optional gradient: returns f(x); when `grad` is non-null it
/// must be filled with df/dx of the same length as x.
using GradFn = std::function<double(const std::vector<double>&, std::vector<double>*)>;

struct GradCheckReport {
    double max_rel = 0.0;
    double mean_rel = 0.0;
    int checked = 0;
    int worst_index = -1;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;

    bool pass(double tol) const { return checked > 0 && max_rel < tol; }
};

/// Compares an analytic gradient against central differences. When
/// max_coords is positive and smaller than the dimension, that many
/// coordinates are sampled without replacement; otherwise all are checked.
/// Relative error uses `floor` to keep near-zero pairs from exploding.
inline GradCheckReport check_gradients(const GradFn& fn, const std::vector<double>& x0,
                                       double eps = 1e-4, int max_coords = -1,
                                       std::uint64_t seed = 1, double floor = 1e-6) {
    if (x0.empty()) throw InvalidInput("check_gradients: empty input");
    std::vector<double> analytic(x0.size(), 0.0);
    fn(x0, &analytic);

    std::vector<int> coords(x0.size());
    std::iota(coords.begin(), coords.end(), 0);
    int n = int(x0.size());
    if (max_coords > 0 && max_coords < n) {
        Rng rng(seed);
        for (int i = 0; i < max_coords; ++i) {
            int j = i + int(rng.below(std::uint64_t(n - i)));
            std::swap(coords[i], coords[j]);
        }
        coords.resize(max_coords);
    }

    GradCheckReport report;
    std::vector<double> x = x0;
    double rel_sum = 0.0;
    for (int idx : coords) {
        double keep = x[idx];
        x[idx] = keep + eps;
        double fp = fn(x, nullptr);
        x[idx] = keep - eps;
        double fm = fn(x, nullptr);
        x[idx] = keep;
        double numeric = (fp - fm) / (2.0 * eps);
        double denom = std::max({std::abs(analytic[idx]), std::abs(numeric), floor});
        double rel = std::abs(analytic[idx] - numeric) / denom;
        rel_sum += rel;
        ++report.checked;
        if (rel > report.max_rel) {
            report.max_rel = rel;
            report.worst_index = idx;
            report.worst_analytic = analytic[idx];
            report.worst_numeric = numeric;
        }
    }
    report.mean_rel = report.checked ? rel_sum / report.checked : 0.0;
    return report;
}

}  // namespace relit

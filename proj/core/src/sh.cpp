// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/core/sh.hpp"

#include <array>
#include <cmath>

#include "relit/errors.hpp"
#include "relit/rng.hpp"

namespace relit::sh {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxCoeffs = coeff_count(kMaxDegree);

// Normalization constants K(l, m) = sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!),
// stored at index(l, |m|).
const std::array<double, kMaxCoeffs>& norm_table() {
    static const std::array<double, kMaxCoeffs> table = [] {
        std::array<double, kMaxCoeffs> t{};
        for (int l = 0; l <= kMaxDegree; ++l) {
            for (int m = 0; m <= l; ++m) {
                double ratio = 1.0;
                for (int k = l - m + 1; k <= l + m; ++k) ratio *= double(k);
                t[index(l, m)] = std::sqrt((2 * l + 1) / (4.0 * kPi) / ratio);
            }
        }
        return t;
    }();
    return table;
}

// Solves A X = B for X, where A is n x n and B is n x k, both row-major.
// Destroys A and B; X lands in B. Partial pivoting.
void solve_inplace(int n, int k, double* a, double* b) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-12)
            throw InvalidInput("sh: singular system in rotation solve");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
            for (int j = 0; j < k; ++j) std::swap(b[col * k + j], b[pivot * k + j]);
        }
        double inv = 1.0 / a[col * n + col];
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            for (int j = 0; j < k; ++j) b[r * k + j] -= f * b[col * k + j];
        }
    }
    for (int r = 0; r < n; ++r) {
        double inv = 1.0 / a[r * n + r];
        for (int j = 0; j < k; ++j) b[r * k + j] *= inv;
    }
}

int degree_of(std::size_t count) {
    for (int d = 0; d <= kMaxDegree; ++d)
        if (std::size_t(coeff_count(d)) == count) return d;
    throw InvalidInput("sh: coefficient count is not a full band count");
}

}  // namespace

void eval(int degree, const Vec3d& dir, double* out) {
    if (degree < 0 || degree > kMaxDegree) throw InvalidInput("sh: degree out of range");
    const auto& norm = norm_table();
    const double x = dir.x, y = dir.y, z = dir.z;

    // p[index(l, m)] holds P_l^m(z) / sin^m(theta), a polynomial in z, with
    // the Condon-Shortley (-1)^m folded in. The sin^m factor is restored
    // through re/im below, so the poles need no special casing.
    std::array<double, kMaxCoeffs> p;
    p[index(0, 0)] = 1.0;
    for (int m = 1; m <= degree; ++m)
        p[index(m, m)] = p[index(m - 1, m - 1)] * -double(2 * m - 1);
    for (int m = 0; m < degree; ++m)
        p[index(m + 1, m)] = z * double(2 * m + 1) * p[index(m, m)];
    for (int m = 0; m <= degree; ++m)
        for (int l = m + 2; l <= degree; ++l)
            p[index(l, m)] = (double(2 * l - 1) * z * p[index(l - 1, m)] -
                              double(l + m - 1) * p[index(l - 2, m)]) /
                             double(l - m);

    // re/im track sin^m(theta) * {cos, sin}(m phi) as Re/Im of (x + iy)^m.
    double re = 1.0, im = 0.0;
    const double sqrt2 = std::sqrt(2.0);
    for (int l = 0; l <= degree; ++l) out[index(l, 0)] = norm[index(l, 0)] * p[index(l, 0)];
    for (int m = 1; m <= degree; ++m) {
        double re_next = x * re - y * im;
        im = x * im + y * re;
        re = re_next;
        for (int l = m; l <= degree; ++l) {
            double base = sqrt2 * norm[index(l, m)] * p[index(l, m)];
            out[index(l, m)] = base * re;
            out[index(l, -m)] = base * im;
        }
    }
}

std::vector<double> eval(int degree, const Vec3d& dir) {
    std::vector<double> out(coeff_count(degree));
    eval(degree, dir, out.data());
    return out;
}

void eval(int degree, const Vec3f& dir, float* out) {
    std::array<double, kMaxCoeffs> tmp;
    eval(degree, Vec3d(dir.x, dir.y, dir.z), tmp.data());
    for (int i = 0; i < coeff_count(degree); ++i) out[i] = float(tmp[i]);
}

double reconstruct(const std::vector<double>& coeffs, const Vec3d& dir) {
    int degree = degree_of(coeffs.size());
    std::array<double, kMaxCoeffs> basis;
    eval(degree, dir, basis.data());
    double sum = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) sum += coeffs[i] * basis[i];
    return sum;
}

Vec3d fibonacci_dir(int i, int n) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    double z = 1.0 - (2.0 * i + 1.0) / double(n);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * double(i);
    return {r * std::cos(phi), r * std::sin(phi), z};
}

std::vector<double> project(int degree, const std::function<double(const Vec3d&)>& f,
                            int n_samples) {
    std::vector<double> coeffs(coeff_count(degree), 0.0);
    std::array<double, kMaxCoeffs> basis;
    for (int i = 0; i < n_samples; ++i) {
        Vec3d dir = fibonacci_dir(i, n_samples);
        double v = f(dir);
        eval(degree, dir, basis.data());
        for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] += v * basis[j];
    }
    double w = 4.0 * kPi / double(n_samples);
    for (double& c : coeffs) c *= w;
    return coeffs;
}

void add_delta(int degree, const Vec3d& dir, double weight, double* coeffs) {
    std::array<double, kMaxCoeffs> basis;
    eval(degree, dir, basis.data());
    for (int i = 0; i < coeff_count(degree); ++i) coeffs[i] += weight * basis[i];
}

std::vector<double> rotate(const std::vector<double>& coeffs, const Mat3d& rot) {
    int degree = degree_of(coeffs.size());
    std::vector<double> out(coeffs.size());
    out[0] = coeffs[0];

    std::array<double, kMaxCoeffs> basis;
    for (int l = 1; l <= degree; ++l) {
        const int n = 2 * l + 1;
        const int base = index(l, -l);
        // Sample directions give one linear condition each: the rotated
        // function agrees with the original at rot^T * d. Random directions
        // keep the sample matrix invertible for every band.
        Rng rng(0x5eedULL + 97 * std::uint64_t(l));
        std::vector<double> a(n * n), b(n * n);
        for (int j = 0; j < n; ++j) {
            Vec3d d;
            do {
                d = {rng.normal(), rng.normal(), rng.normal()};
            } while (length(d) < 1e-3);
            d = normalize(d);
            eval(degree, d, basis.data());
            for (int m = 0; m < n; ++m) a[j * n + m] = basis[base + m];
            eval(degree, tmul(rot, d), basis.data());
            for (int m = 0; m < n; ++m) b[j * n + m] = basis[base + m];
        }
        solve_inplace(n, n, a.data(), b.data());
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int m = 0; m < n; ++m) sum += b[i * n + m] * coeffs[base + m];
            out[base + i] = sum;
        }
    }
    return out;
}

std::vector<double> band_energy(const std::vector<double>& coeffs) {
    int degree = degree_of(coeffs.size());
    std::vector<double> energy(degree + 1, 0.0);
    for (int l = 0; l <= degree; ++l)
        for (int m = -l; m <= l; ++m) energy[l] += coeffs[index(l, m)] * coeffs[index(l, m)];
    return energy;
}

}  // namespace relit::sh

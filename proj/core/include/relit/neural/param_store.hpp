// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relit/neural/autodiff.hpp"

namespace relit {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Named trainable tensors with their Adam moments. A training step feeds
/// parameters into a tape, runs forward/backward, harvests the gradients
/// back, and applies adam_step.
template <typename T>
class ParamStore {
  public:
    struct Entry {
        Shape shape;
        std::vector<T> value;
        std::vector<T> grad;
        std::vector<T> m, v;
    };

    Entry& add(const std::string& name, const Shape& shape) {
        if (entries_.count(name)) throw InvalidInput("ParamStore: duplicate param " + name);
        Entry& e = entries_[name];
        e.shape = shape;
        std::size_t n = std::size_t(shape.numel());
        e.value.assign(n, T(0));
        e.grad.assign(n, T(0));
        e.m.assign(n, T(0));
        e.v.assign(n, T(0));
        return e;
    }

    bool has(const std::string& name) const { return entries_.count(name) != 0; }

    Entry& at(const std::string& name) {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw InvalidInput("ParamStore: unknown param " + name);
        return it->second;
    }
    const Entry& at(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw InvalidInput("ParamStore: unknown param " + name);
        return it->second;
    }

    /// Copies a parameter into the tape and remembers the binding so
    /// harvest() can read its gradient back.
    Var<T> feed(Tape<T>& tape, const std::string& name) {
        Entry& e = at(name);
        Var<T> v = tape.constant(e.shape, e.value.data());
        fed_.emplace_back(name, v);
        return v;
    }

    /// Accumulates tape gradients of every fed parameter and clears the
    /// bindings. Call once after tape.backward().
    void harvest(Tape<T>& tape) {
        for (auto& [name, var] : fed_) {
            Entry& e = at(name);
            const auto& g = tape.grad(var);
            for (std::size_t i = 0; i < g.size(); ++i) e.grad[i] += g[i];
        }
        fed_.clear();
    }

    void zero_grad() {
        for (auto& [name, e] : entries_) std::fill(e.grad.begin(), e.grad.end(), T(0));
    }

    void adam_step(const AdamConfig& cfg) {
        ++step_;
        double bc1 = 1.0 - std::pow(cfg.beta1, double(step_));
        double bc2 = 1.0 - std::pow(cfg.beta2, double(step_));
        for (auto& [name, e] : entries_) {
            for (std::size_t i = 0; i < e.value.size(); ++i) {
                double g = double(e.grad[i]);
                double m = cfg.beta1 * double(e.m[i]) + (1.0 - cfg.beta1) * g;
                double v = cfg.beta2 * double(e.v[i]) + (1.0 - cfg.beta2) * g * g;
                e.m[i] = T(m);
                e.v[i] = T(v);
                e.value[i] -= T(cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps));
            }
        }
        zero_grad();
    }

    std::int64_t step() const { return step_; }
    void set_step(std::int64_t s) { step_ = s; }

    std::int64_t total_params() const {
        std::int64_t n = 0;
        for (const auto& [name, e] : entries_) n += e.shape.numel();
        return n;
    }

    /// Deterministic name order (map order).
    const std::map<std::string, Entry>& entries() const { return entries_; }
    std::map<std::string, Entry>& entries() { return entries_; }

  private:
    std::map<std::string, Entry> entries_;
    std::vector<std::pair<std::string, Var<T>>> fed_;
    std::int64_t step_ = 0;
};

}  // namespace relit

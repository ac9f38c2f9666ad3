// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

namespace relit {

/// Flat key=value configuration. '#' starts a comment, blank lines are
/// skipped, keys and values are trimmed, and a repeated key overrides the
/// earlier value.
class ConfigFile {
  public:
    static ConfigFile load(const std::string& path);
    static ConfigFile parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    /// Accessors with a fallback. The typed ones throw InvalidInput when the
    /// stored text does not parse as the requested type.
    std::string get(const std::string& key, const std::string& fallback) const;
    double get(const std::string& key, double fallback) const;
    int get(const std::string& key, int fallback) const;
    bool get(const std::string& key, bool fallback) const;

    /// Throws InvalidInput when the key is absent.
    std::string require(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace relit

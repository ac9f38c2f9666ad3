// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include "relit/core/config_file.hpp"

#include <fstream>
#include <sstream>

#include "relit/errors.hpp"

namespace relit {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config: " + origin + ":" + std::to_string(line_no) +
                               ": expected key=value");
        std::string key = trim(body.substr(0, eq));
        if (key.empty())
            throw InvalidInput("config: " + origin + ":" + std::to_string(line_no) +
                               ": empty key");
        cfg.values_[key] = trim(body.substr(eq + 1));
    }
    return cfg;
}

std::string ConfigFile::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigFile::get(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw InvalidInput("config: key '" + key + "' is not a number: " + it->second);
    }
}

int ConfigFile::get(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        int v = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw InvalidInput("config: key '" + key + "' is not an integer: " + it->second);
    }
}

bool ConfigFile::get(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InvalidInput("config: key '" + key + "' is not a boolean: " + v);
}

std::string ConfigFile::require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw InvalidInput("config: missing required key '" + key + "'");
    return it->second;
}

}  // namespace relit

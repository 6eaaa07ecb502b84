// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "itr/experiments.hpp"

namespace itr::config {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key-value config with [section] headers; keys are stored as
/// "section.key". Unknown keys are rejected so typos fail loudly.
class Config {
  public:
    static Config defaults();
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_text(const std::string& text);

    /// "section.key=value"; the key must already exist.
    void apply_override(const std::string& keyval);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    /// Comma list or "start:step:stop" range.
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key) const;

    /// Sorted "section.key=value" lines; input to the config hash.
    std::string canonical() const;

  private:
    std::map<std::string, std::string> kv_;
};

experiments::ExperimentConfig to_experiment_config(const Config& cfg);

} // namespace itr::config

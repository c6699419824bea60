#pragma once

#include "core/provider.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace permap {

// Flat TOML-style key/value configuration. `[section]` headers prefix the
// keys that follow (`[provider]` + `retries = 2` -> `provider.retries`).
// Values: quoted strings, integers, floats, booleans and single-line string
// arrays. Every tunable has a default; credentials come only from the
// environment variable named in `provider.credential_env`.
class PipelineConfig {
public:
    PipelineConfig() = default;

    static PipelineConfig load(const std::filesystem::path& file);

    // Command-line override; the raw text is parsed like a config value.
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback = {}) const;
    long get_int(const std::string& key, long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;

    // Resolved against the config file's directory when relative; empty when
    // unset.
    std::filesystem::path get_path(const std::string& key) const;

    ProviderConfig provider() const;
    int max_iterations() const { return static_cast<int>(get_int("max_iterations", 3)); }
    double similarity_threshold() const { return get_double("similarity_threshold", 0.6); }
    std::vector<std::string> trigger_keywords() const;
    std::vector<std::string> banned_tokens() const;
    std::size_t verify_sample() const { return static_cast<std::size_t>(get_int("verify_sample", 0)); }

    const std::map<std::string, std::string>& raw() const { return values_; }

private:
    std::filesystem::path base_dir_;
    std::map<std::string, std::string> values_;          // scalars, unquoted
    std::map<std::string, std::vector<std::string>> lists_;
};

} // namespace permap

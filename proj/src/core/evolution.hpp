#pragma once

#include "core/store.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace permap {

struct OverlapReport {
    std::size_t our_total = 0;
    std::size_t baseline_total = 0;
    std::size_t same = 0;
    std::size_t ours_only = 0;      // new APIs relative to the baseline
    std::size_t baseline_only = 0;
};

OverlapReport overlap_sets(const std::set<std::string>& ours, const std::set<std::string>& baseline);

// Our side = signature keys of the store's permission-required mappings
// (optionally restricted to JNI records for cross-language baselines).
OverlapReport overlap_report(const MappingStore& store, const std::set<std::string>& baseline_keys,
                             bool jni_only = false);

// One `fq_class#name(paramTypes)` per line; `fq_class.name(...)` spellings
// and missing parameter lists are normalized. '#'-prefixed lines and blanks
// are skipped.
std::set<std::string> load_baseline_keys(const std::filesystem::path& file);
std::string normalize_baseline_line(const std::string& line);

struct PackageDistribution {
    std::map<std::string, std::size_t> per_package;  // keyed by top_package
    std::size_t total = 0;
};

// Permission-required mappings grouped by top_package.
PackageDistribution distribution(const MappingStore& store);

struct VersionDiff {
    std::set<std::string> added;     // keys only in b
    std::set<std::string> removed;   // keys only in a
    std::set<std::string> retained;  // keys in both
    // package -> (mappings in a, mappings in b); package is the fq_class
    // minus its final segment.
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_package;
};

// Cross-version comparison keyed on (fq_class, name, param_types), so a
// method matches across corpora with different corpus_ids.
VersionDiff diff_versions(const MappingStore& a, const MappingStore& b);

nlohmann::json to_json(const OverlapReport& r);
nlohmann::json to_json(const PackageDistribution& d);
nlohmann::json to_json(const VersionDiff& d);
std::string render_text(const OverlapReport& r, const std::string& title);
std::string render_text(const PackageDistribution& d, const std::string& title);
std::string render_text(const VersionDiff& d, const std::string& title);

} // namespace permap

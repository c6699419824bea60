#pragma once

#include "core/config.hpp"
#include "core/extractor.hpp"
#include "core/store.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace permap {

// Creates `<base>/<corpus_id>-<UTC stamp>/` (suffixing on collision) and
// rewrites the `<base>/latest` pointer file.
std::filesystem::path make_run_dir(const std::filesystem::path& base, const std::string& corpus_id);

struct ExtractRunResult {
    std::filesystem::path store_path;
    std::size_t covered = 0;
    std::size_t keyword_extracted = 0;
    std::vector<ScanWarning> warnings;
};

// Scan the configured corpus into a fresh store file under a new run
// directory; declared annotations become `declared` mappings immediately.
ExtractRunResult run_extract(const PipelineConfig& config,
                             const std::filesystem::path& out_override = {});

struct AnalyzeRunResult {
    std::size_t permission_required = 0;
    std::vector<std::string> failed_api_ids;
};

// Dual-role analysis over every record of an existing store, updated in
// place.
AnalyzeRunResult run_analyze(const PipelineConfig& config, const std::filesystem::path& store_path,
                             const std::filesystem::path& mock_oracle_override = {});

struct VerifyRunResult {
    std::size_t candidates = 0;
    std::size_t verified = 0;
    std::vector<std::string> rejected_api_ids;
    std::vector<std::string> unverified_api_ids;
};

// retrieve -> generate -> validate -> refine -> execute -> confirm over every
// candidate mapping; store updated in place.
VerifyRunResult run_verify(const PipelineConfig& config, const std::filesystem::path& store_path,
                           const std::filesystem::path& mock_oracle_override = {});

struct ReportRunResult {
    std::filesystem::path report_dir;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> notices;
};

// Emits annotation-gap, distribution (and, when configured, doc-gap, overlap
// and cross-version diff) reports, as JSON plus aligned text.
ReportRunResult run_report(const PipelineConfig& config,
                           const std::vector<std::filesystem::path>& store_paths,
                           const std::filesystem::path& out_override = {});

struct ExportRunResult {
    std::filesystem::path bundle_dir;
    std::size_t bundle_count = 0;
};

// Standalone client-app bundles for validated test cases.
ExportRunResult run_export(const PipelineConfig& config, const std::filesystem::path& store_path,
                           const std::filesystem::path& out_override = {});

} // namespace permap

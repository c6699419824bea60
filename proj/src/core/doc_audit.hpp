#pragma once

#include "core/store.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace permap {

struct SignatureKey {
    std::string fq_class;
    std::string name;
    int arity = 0;

    auto operator<=>(const SignatureKey&) const = default;
    std::string to_string() const;
};

enum class DeclarationKind { standardized, non_standardized, absent };

const char* to_string(DeclarationKind k);

struct DocRecord {
    SignatureKey signature_key;
    DeclarationKind declaration_kind = DeclarationKind::absent;
    std::set<std::string> permissions_mentioned;
    std::string source_page;
};

struct IngestResult {
    std::vector<DocRecord> records;
    std::vector<std::string> warnings;  // unparseable pages, skipped
};

// Reads a documentation dump: `.docrec.json` pages and minimal `.html` pages.
// A page is standardized when it carries a `RequiresPermission:` marker
// block, non-standardized when only free-text permission tokens appear in its
// description, absent otherwise.
IngestResult ingest_doc_dump(const std::filesystem::path& dir);

// Free-text permission mentions: canonical-grammar tokens plus bare
// UPPER_SNAKE names (underscore-bearing, or a known single-word permission).
std::set<std::string> scan_doc_permission_mentions(std::string_view text);

struct GapItem {
    std::string id;      // api_id, or signature key for doc-only entries
    std::string status;  // annotated_and_discovered | annotated_only | new_discovery
};

struct GapReport {
    int sdk_version = 0;
    std::size_t discovered_total = 0;
    std::size_t annotated_total = 0;
    std::size_t new_discoveries = 0;  // |discovered ∖ annotated|, set difference
    std::vector<GapItem> itemized;
    std::vector<std::string> ambiguous;        // doc joins excluded from counts
    std::vector<std::string> non_standardized; // doc_gap only, itemized separately
};

// Annotated = records with nonempty declared_permissions; discovered =
// permission-required mappings.
GapReport annotation_gap(const MappingStore& store);

// Annotated = standardized doc records joined on (fq_class, name, arity);
// arity collisions are flagged ambiguous and excluded from the counts.
GapReport doc_gap(const MappingStore& store, const std::vector<DocRecord>& docs);

nlohmann::json to_json(const GapReport& report);
std::string render_text(const GapReport& report, const std::string& title);

} // namespace permap

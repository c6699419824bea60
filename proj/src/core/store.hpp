#pragma once

#include "core/records.hpp"

#include <filesystem>
#include <optional>

namespace permap {

// Line-oriented database of extracted records and their permission mappings.
// Records are kept sorted by api_id; mappings only exist for APIs classified
// permission-required (nonempty permission set).
class MappingStore {
public:
    MappingStore() = default;
    MappingStore(std::string corpus_id, int sdk_version)
        : corpus_id_(std::move(corpus_id)), sdk_version_(sdk_version) {}

    const std::string& corpus_id() const { return corpus_id_; }
    int sdk_version() const { return sdk_version_; }

    const std::vector<ApiRecord>& records() const { return records_; }
    const std::map<std::string, PermissionMapping>& mappings() const { return mappings_; }

    std::size_t covered_count() const { return records_.size(); }
    std::size_t permission_required_count() const { return mappings_.size(); }

    void add_record(ApiRecord record);
    const ApiRecord* find_record(const std::string& api_id) const;
    const PermissionMapping* find_mapping(const std::string& api_id) const;
    PermissionMapping* find_mapping_mut(const std::string& api_id);

    // Unions permissions into the mapping for api_id, adds the provenance tag
    // and upgrades confidence monotonically. An empty permission set leaves
    // the store untouched. Unknown api_id is an integrity error.
    void upsert_mapping(const std::string& api_id, const std::set<std::string>& permissions,
                        const std::string& provenance_tag,
                        Confidence confidence = Confidence::declared);

    void set_verify_flag(const std::string& api_id, const std::string& flag);

    bool operator==(const MappingStore&) const = default;

private:
    std::string corpus_id_;
    int sdk_version_ = 0;
    std::vector<ApiRecord> records_;            // sorted by api_id
    std::map<std::string, PermissionMapping> mappings_;
};

struct QueryFilter {
    std::optional<std::string> package_prefix;  // dotted-segment prefix of fq_class
    std::optional<std::string> permission;      // canonical name the mapping must contain
    std::optional<std::string> provenance;      // tag the mapping must carry
    bool jni_only = false;
};

// Mappings whose joined ApiRecord satisfies every supplied predicate,
// ordered by api_id.
std::vector<PermissionMapping> query(const MappingStore& store, const QueryFilter& filter);

// `.pmdb.jsonl`: header line, then "api" lines and "map" lines sorted by
// api_id. load(save(s)) == s.
void save_store(const MappingStore& store, const std::filesystem::path& file);
MappingStore load_store(const std::filesystem::path& file);

} // namespace permap

#include "core/store.hpp"

#include "core/errors.hpp"
#include "core/hash128.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace permap {

using nlohmann::json;

std::string MethodSignature::key() const {
    std::string out = fq_class + "#" + name + "(";
    for (std::size_t i = 0; i < param_types.size(); ++i) {
        if (i) out += ",";
        out += param_types[i];
    }
    out += ")";
    return out;
}

std::string MethodSignature::dotted() const {
    std::string out = fq_class + "." + name + "(";
    for (std::size_t i = 0; i < param_types.size(); ++i) {
        if (i) out += ",";
        out += param_types[i];
    }
    out += ")";
    return out;
}

const char* to_string(Confidence c) {
    switch (c) {
        case Confidence::declared: return "declared";
        case Confidence::predicted: return "predicted";
        case Confidence::verified: return "verified";
    }
    return "declared";
}

const char* to_string(ExtractionSource s) {
    return s == ExtractionSource::parser ? "parser" : "keyword";
}

Confidence confidence_from_string(const std::string& s) {
    if (s == "declared") return Confidence::declared;
    if (s == "predicted") return Confidence::predicted;
    if (s == "verified") return Confidence::verified;
    throw PermapError(ErrorCode::load_error, "unknown confidence: " + s);
}

ExtractionSource extraction_source_from_string(const std::string& s) {
    if (s == "parser") return ExtractionSource::parser;
    if (s == "keyword") return ExtractionSource::keyword;
    throw PermapError(ErrorCode::load_error, "unknown extraction source: " + s);
}

std::string make_api_id(const std::string& corpus_id, const MethodSignature& sig) {
    std::string material = corpus_id;
    material += '|';
    material += sig.fq_class;
    material += '|';
    material += sig.name;
    material += '|';
    for (const auto& p : sig.param_types) {
        material += p;
        material += '\x1f';
    }
    return to_hex(fnv1a_128(material));
}

void MappingStore::add_record(ApiRecord record) {
    auto it = std::lower_bound(records_.begin(), records_.end(), record.api_id,
                               [](const ApiRecord& r, const std::string& id) { return r.api_id < id; });
    if (it != records_.end() && it->api_id == record.api_id) {
        throw PermapError(ErrorCode::integrity_error,
                          "duplicate api_id in store: " + record.api_id);
    }
    records_.insert(it, std::move(record));
}

const ApiRecord* MappingStore::find_record(const std::string& api_id) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), api_id,
                               [](const ApiRecord& r, const std::string& id) { return r.api_id < id; });
    if (it == records_.end() || it->api_id != api_id) return nullptr;
    return &*it;
}

const PermissionMapping* MappingStore::find_mapping(const std::string& api_id) const {
    auto it = mappings_.find(api_id);
    return it == mappings_.end() ? nullptr : &it->second;
}

PermissionMapping* MappingStore::find_mapping_mut(const std::string& api_id) {
    auto it = mappings_.find(api_id);
    return it == mappings_.end() ? nullptr : &it->second;
}

void MappingStore::upsert_mapping(const std::string& api_id, const std::set<std::string>& permissions,
                                  const std::string& provenance_tag, Confidence confidence) {
    if (!find_record(api_id)) {
        throw PermapError(ErrorCode::integrity_error,
                          "upsert for unknown api_id: " + api_id);
    }
    if (permissions.empty()) return;
    auto it = mappings_.find(api_id);
    if (it == mappings_.end()) {
        PermissionMapping m;
        m.api_id = api_id;
        m.permissions = permissions;
        m.provenance.insert(provenance_tag);
        m.confidence = confidence;
        m.sdk_version = sdk_version_;
        mappings_.emplace(api_id, std::move(m));
        return;
    }
    PermissionMapping& m = it->second;
    m.permissions.insert(permissions.begin(), permissions.end());
    m.provenance.insert(provenance_tag);
    m.confidence = std::max(m.confidence, confidence);
}

void MappingStore::set_verify_flag(const std::string& api_id, const std::string& flag) {
    if (auto* m = find_mapping_mut(api_id)) m->verify_flag = flag;
}

namespace {

bool package_prefix_matches(const std::string& fq_class, const std::string& prefix) {
    if (fq_class == prefix) return true;
    return fq_class.size() > prefix.size() && fq_class.compare(0, prefix.size(), prefix) == 0 &&
           fq_class[prefix.size()] == '.';
}

} // namespace

std::vector<PermissionMapping> query(const MappingStore& store, const QueryFilter& filter) {
    std::vector<PermissionMapping> out;
    for (const auto& [api_id, mapping] : store.mappings()) {
        const ApiRecord* record = store.find_record(api_id);
        if (!record) continue;
        if (filter.package_prefix &&
            !package_prefix_matches(record->signature.fq_class, *filter.package_prefix)) {
            continue;
        }
        if (filter.permission && !mapping.permissions.contains(*filter.permission)) continue;
        if (filter.provenance && !mapping.provenance.contains(*filter.provenance)) continue;
        if (filter.jni_only && !record->is_jni) continue;
        out.push_back(mapping);
    }
    return out;
}

namespace {

json record_to_json(const ApiRecord& r) {
    json j;
    j["kind"] = "api";
    j["api_id"] = r.api_id;
    j["fq_class"] = r.signature.fq_class;
    j["name"] = r.signature.name;
    j["param_types"] = r.signature.param_types;
    j["return_type"] = r.signature.return_type;
    j["modifiers"] = std::vector<std::string>(r.signature.modifiers.begin(), r.signature.modifiers.end());
    j["file"] = r.file_path;
    j["line"] = r.line;
    j["top_package"] = r.top_package;
    j["api_level"] = r.api_level;
    j["deprecated"] = r.deprecated;
    j["doc_comment"] = r.doc_comment;
    j["body_text"] = r.body_text;
    j["declared_permissions"] =
        std::vector<std::string>(r.declared_permissions.begin(), r.declared_permissions.end());
    j["is_jni"] = r.is_jni;
    j["source"] = to_string(r.extraction_source);
    return j;
}

ApiRecord record_from_json(const json& j) {
    ApiRecord r;
    r.api_id = j.at("api_id").get<std::string>();
    r.signature.fq_class = j.at("fq_class").get<std::string>();
    r.signature.name = j.at("name").get<std::string>();
    r.signature.param_types = j.at("param_types").get<std::vector<std::string>>();
    r.signature.return_type = j.at("return_type").get<std::string>();
    for (const auto& m : j.at("modifiers")) r.signature.modifiers.insert(m.get<std::string>());
    r.file_path = j.at("file").get<std::string>();
    r.line = j.at("line").get<int>();
    r.top_package = j.at("top_package").get<std::string>();
    r.api_level = j.at("api_level").get<int>();
    r.deprecated = j.at("deprecated").get<bool>();
    r.doc_comment = j.at("doc_comment").get<std::string>();
    r.body_text = j.at("body_text").get<std::string>();
    for (const auto& p : j.at("declared_permissions")) r.declared_permissions.insert(p.get<std::string>());
    r.is_jni = j.at("is_jni").get<bool>();
    r.extraction_source = extraction_source_from_string(j.at("source").get<std::string>());
    return r;
}

json mapping_to_json(const PermissionMapping& m) {
    json j;
    j["kind"] = "map";
    j["api_id"] = m.api_id;
    j["permissions"] = std::vector<std::string>(m.permissions.begin(), m.permissions.end());
    j["provenance"] = std::vector<std::string>(m.provenance.begin(), m.provenance.end());
    j["confidence"] = to_string(m.confidence);
    j["sdk_version"] = m.sdk_version;
    if (!m.verify_flag.empty()) j["verify_flag"] = m.verify_flag;
    return j;
}

PermissionMapping mapping_from_json(const json& j) {
    PermissionMapping m;
    m.api_id = j.at("api_id").get<std::string>();
    for (const auto& p : j.at("permissions")) m.permissions.insert(p.get<std::string>());
    for (const auto& t : j.at("provenance")) m.provenance.insert(t.get<std::string>());
    m.confidence = confidence_from_string(j.at("confidence").get<std::string>());
    m.sdk_version = j.at("sdk_version").get<int>();
    if (j.contains("verify_flag")) m.verify_flag = j.at("verify_flag").get<std::string>();
    return m;
}

[[noreturn]] void load_fail(const std::filesystem::path& file, int line_no, const std::string& why) {
    throw PermapError(ErrorCode::load_error,
                      file.string() + ":" + std::to_string(line_no) + ": " + why);
}

} // namespace

void save_store(const MappingStore& store, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw PermapError(ErrorCode::io_error, "cannot write store file: " + file.string());
    }
    json header;
    header["format_version"] = 1;
    header["corpus_id"] = store.corpus_id();
    header["sdk_version"] = store.sdk_version();
    out << header.dump() << "\n";
    for (const auto& r : store.records()) {
        out << record_to_json(r).dump() << "\n";
    }
    for (const auto& [id, m] : store.mappings()) {
        out << mapping_to_json(m).dump() << "\n";
    }
    if (!out) {
        throw PermapError(ErrorCode::io_error, "short write to store file: " + file.string());
    }
}

MappingStore load_store(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw PermapError(ErrorCode::load_error, "cannot open store file: " + file.string());
    }
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) load_fail(file, 1, "empty store file, header expected");
    ++line_no;
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object() || !header.contains("format_version") ||
        !header.contains("corpus_id") || !header.contains("sdk_version")) {
        load_fail(file, line_no, "malformed header line");
    }
    MappingStore store;
    try {
        if (header["format_version"].get<int>() != 1) {
            load_fail(file, line_no, "unsupported format_version");
        }
        store = MappingStore(header["corpus_id"].get<std::string>(),
                             header["sdk_version"].get<int>());
    } catch (const json::exception& e) {
        load_fail(file, line_no, std::string("bad header field: ") + e.what());
    }

    std::vector<PermissionMapping> pending;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("kind")) {
            load_fail(file, line_no, "malformed record line");
        }
        try {
            const std::string kind = j["kind"].get<std::string>();
            if (kind == "api") {
                store.add_record(record_from_json(j));
            } else if (kind == "map") {
                pending.push_back(mapping_from_json(j));
            } else {
                load_fail(file, line_no, "unknown line kind: " + kind);
            }
        } catch (const json::exception& e) {
            load_fail(file, line_no, std::string("bad field: ") + e.what());
        }
    }
    for (auto& m : pending) {
        if (!store.find_record(m.api_id)) {
            throw PermapError(ErrorCode::load_error,
                              file.string() + ": mapping references unknown api_id " + m.api_id);
        }
        if (m.permissions.empty() || m.provenance.empty()) {
            throw PermapError(ErrorCode::load_error,
                              file.string() + ": mapping with empty permission or provenance set: " + m.api_id);
        }
        const std::string api_id = m.api_id;
        const std::string flag = m.verify_flag;
        // Rebuild through upsert so invariants hold, then restore exact fields.
        store.upsert_mapping(api_id, m.permissions, *m.provenance.begin(), m.confidence);
        PermissionMapping* stored = store.find_mapping_mut(api_id);
        stored->provenance = m.provenance;
        stored->sdk_version = m.sdk_version;
        stored->verify_flag = flag;
    }
    return store;
}

} // namespace permap

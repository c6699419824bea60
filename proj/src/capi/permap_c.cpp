#include "permap/permap.h"

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/store.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <new>
#include <string>

using nlohmann::json;

namespace {

thread_local int g_last_error = PERMAP_OK;
thread_local std::string g_last_message;

void set_error(int code, const std::string& message) {
    g_last_error = code;
    g_last_message = message;
}

void clear_error() {
    g_last_error = PERMAP_OK;
    g_last_message.clear();
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs fn, translating exceptions into the thread-local error state.
template <typename Fn>
int guarded(Fn&& fn) {
    clear_error();
    try {
        fn();
        return PERMAP_OK;
    } catch (const permap::PermapError& e) {
        set_error(static_cast<int>(e.code()), e.what());
    } catch (const std::exception& e) {
        set_error(PERMAP_ERR_INTERNAL, e.what());
    } catch (...) {
        set_error(PERMAP_ERR_INTERNAL, "unknown failure");
    }
    return g_last_error == PERMAP_OK ? PERMAP_ERR_INTERNAL : g_last_error;
}

} // namespace

struct permap_config {
    permap::PipelineConfig impl;
};

struct permap_store {
    permap::MappingStore impl;
};

extern "C" {

const char* permap_version(void) {
    return "0.1.0";
}

int permap_last_error(void) {
    return g_last_error;
}

const char* permap_last_error_message(void) {
    return g_last_message.c_str();
}

void permap_free(void* ptr) {
    ::operator delete(ptr);
}

permap_config* permap_config_open(const char* path) {
    permap_config* config = nullptr;
    guarded([&] {
        if (!path) throw permap::PermapError(permap::ErrorCode::config_error, "path is null");
        auto loaded = permap::PipelineConfig::load(path);
        config = new permap_config{std::move(loaded)};
    });
    return config;
}

permap_config* permap_config_new(void) {
    clear_error();
    return new (std::nothrow) permap_config{};
}

int permap_config_set(permap_config* config, const char* key, const char* value) {
    return guarded([&] {
        if (!config || !key || !value) {
            throw permap::PermapError(permap::ErrorCode::config_error, "null argument");
        }
        config->impl.set(key, value);
    });
}

void permap_config_close(permap_config* config) {
    delete config;
}

int permap_run_extract(permap_config* config, const char* out_dir, char** out_store_path,
                       long* covered, long* keyword_extracted) {
    return guarded([&] {
        if (!config) throw permap::PermapError(permap::ErrorCode::config_error, "config is null");
        auto result = permap::run_extract(config->impl, out_dir ? out_dir : "");
        if (out_store_path) *out_store_path = dup_string(result.store_path.string());
        if (covered) *covered = static_cast<long>(result.covered);
        if (keyword_extracted) *keyword_extracted = static_cast<long>(result.keyword_extracted);
    });
}

int permap_run_analyze(permap_config* config, const char* store_path, const char* mock_oracle,
                       long* permission_required) {
    return guarded([&] {
        if (!config || !store_path) {
            throw permap::PermapError(permap::ErrorCode::config_error, "null argument");
        }
        auto result = permap::run_analyze(config->impl, store_path,
                                          mock_oracle ? mock_oracle : "");
        if (permission_required) *permission_required = static_cast<long>(result.permission_required);
    });
}

int permap_run_verify(permap_config* config, const char* store_path, const char* mock_oracle,
                      long* verified, char** reject_list) {
    return guarded([&] {
        if (!config || !store_path) {
            throw permap::PermapError(permap::ErrorCode::config_error, "null argument");
        }
        auto result = permap::run_verify(config->impl, store_path, mock_oracle ? mock_oracle : "");
        if (verified) *verified = static_cast<long>(result.verified);
        if (reject_list) {
            *reject_list = dup_string(json(result.rejected_api_ids).dump());
        }
    });
}

int permap_run_report(permap_config* config, const char* const* store_paths, int store_count,
                      const char* out_dir, char** report_dir) {
    return guarded([&] {
        if (!config || !store_paths || store_count <= 0) {
            throw permap::PermapError(permap::ErrorCode::config_error, "null argument");
        }
        std::vector<std::filesystem::path> paths;
        paths.reserve(static_cast<std::size_t>(store_count));
        for (int i = 0; i < store_count; ++i) paths.emplace_back(store_paths[i]);
        auto result = permap::run_report(config->impl, paths, out_dir ? out_dir : "");
        if (report_dir) *report_dir = dup_string(result.report_dir.string());
    });
}

int permap_run_export(permap_config* config, const char* store_path, const char* out_dir,
                      char** bundle_dir, long* bundle_count) {
    return guarded([&] {
        if (!config || !store_path) {
            throw permap::PermapError(permap::ErrorCode::config_error, "null argument");
        }
        auto result = permap::run_export(config->impl, store_path, out_dir ? out_dir : "");
        if (bundle_dir) *bundle_dir = dup_string(result.bundle_dir.string());
        if (bundle_count) *bundle_count = static_cast<long>(result.bundle_count);
    });
}

permap_store* permap_store_open(const char* path) {
    permap_store* store = nullptr;
    guarded([&] {
        if (!path) throw permap::PermapError(permap::ErrorCode::load_error, "path is null");
        auto loaded = permap::load_store(path);
        store = new permap_store{std::move(loaded)};
    });
    return store;
}

void permap_store_close(permap_store* store) {
    delete store;
}

long permap_store_record_count(const permap_store* store) {
    return store ? static_cast<long>(store->impl.covered_count()) : -1;
}

long permap_store_mapping_count(const permap_store* store) {
    return store ? static_cast<long>(store->impl.permission_required_count()) : -1;
}

int permap_store_sdk_version(const permap_store* store) {
    return store ? store->impl.sdk_version() : -1;
}

char* permap_store_corpus_id(const permap_store* store) {
    if (!store) return nullptr;
    clear_error();
    return dup_string(store->impl.corpus_id());
}

char* permap_store_query(const permap_store* store, const char* filter_json) {
    char* out = nullptr;
    guarded([&] {
        if (!store) throw permap::PermapError(permap::ErrorCode::load_error, "store is null");
        permap::QueryFilter filter;
        if (filter_json && *filter_json) {
            json j = json::parse(filter_json, nullptr, false);
            if (j.is_discarded() || !j.is_object()) {
                throw permap::PermapError(permap::ErrorCode::load_error, "filter must be a JSON object");
            }
            if (j.contains("package_prefix")) filter.package_prefix = j["package_prefix"].get<std::string>();
            if (j.contains("permission")) filter.permission = j["permission"].get<std::string>();
            if (j.contains("provenance")) filter.provenance = j["provenance"].get<std::string>();
            if (j.contains("jni_only")) filter.jni_only = j["jni_only"].get<bool>();
        }
        json rows = json::array();
        for (const auto& m : permap::query(store->impl, filter)) {
            json row;
            row["api_id"] = m.api_id;
            row["permissions"] = std::vector<std::string>(m.permissions.begin(), m.permissions.end());
            row["provenance"] = std::vector<std::string>(m.provenance.begin(), m.provenance.end());
            row["confidence"] = permap::to_string(m.confidence);
            rows.push_back(std::move(row));
        }
        out = dup_string(rows.dump());
    });
    return out;
}

} // extern "C"

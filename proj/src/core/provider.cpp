#include "core/provider.hpp"

#include "core/canonical.hpp"
#include "core/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace permap {

using nlohmann::json;

std::size_t Provider::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
}

std::vector<std::string> Provider::call_log() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

void Provider::log_call(const std::string& prompt) {
    std::lock_guard lock(mutex_);
    calls_.push_back(prompt);
}

bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

namespace {

std::map<std::string, std::set<std::string>> load_role_map(const json& j, const char* role,
                                                           const std::filesystem::path& file) {
    std::map<std::string, std::set<std::string>> out;
    if (!j.contains(role)) return out;
    if (!j[role].is_object()) {
        throw PermapError(ErrorCode::oracle_error,
                          std::string("oracle role '") + role + "' must be an object: " + file.string());
    }
    for (const auto& [pattern, perms] : j[role].items()) {
        if (!perms.is_array()) {
            throw PermapError(ErrorCode::oracle_error,
                              "oracle entry for '" + pattern + "' must be an array");
        }
        std::set<std::string> canonical;
        for (const auto& p : perms) {
            canonical.insert(canonicalize_permission(p.get<std::string>()));
        }
        out.emplace(pattern, std::move(canonical));
    }
    return out;
}

bool looks_like_api_id(std::string_view key) {
    if (key.size() != 32) return false;
    for (char c : key) {
        if (!std::isxdigit(static_cast<unsigned char>(c)) ||
            std::isupper(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

// The target line rendered by build_prompt, e.g.
// `Target method (SDK 15): android.net.Wifi.scan()`.
std::string extract_target_signature(const std::string& prompt) {
    constexpr std::string_view kMarker = "Target method (SDK ";
    const auto pos = prompt.find(kMarker);
    if (pos == std::string::npos) return {};
    const auto colon = prompt.find("): ", pos);
    if (colon == std::string::npos) return {};
    const auto start = colon + 3;
    const auto end = prompt.find('\n', start);
    return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

} // namespace

MockProvider::MockProvider(const std::filesystem::path& oracle_file) {
    std::ifstream in(oracle_file);
    if (!in) {
        throw PermapError(ErrorCode::oracle_error,
                          "cannot open mock oracle file: " + oracle_file.string());
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw PermapError(ErrorCode::oracle_error,
                          "malformed mock oracle file: " + oracle_file.string());
    }
    detector_ = load_role_map(j, "detector", oracle_file);
    analyst_ = load_role_map(j, "analyst", oracle_file);
}

void MockProvider::resolve_api_ids(const MappingStore& store) {
    for (auto* role_map : {&detector_, &analyst_}) {
        std::map<std::string, std::set<std::string>> resolved;
        for (auto& [key, perms] : *role_map) {
            if (looks_like_api_id(key)) {
                if (const ApiRecord* r = store.find_record(key)) {
                    resolved[r->signature.dotted()] = perms;
                    continue;
                }
            }
            resolved[key] = perms;
        }
        *role_map = std::move(resolved);
    }
}

std::string MockProvider::complete(const std::string& prompt) {
    log_call(prompt);
    const bool analyst = prompt.find("Permission Analyst") != std::string::npos;
    const auto& role_map = analyst ? analyst_ : detector_;

    const std::string dotted = extract_target_signature(prompt);
    std::string dotted_no_params = dotted;
    if (const auto paren = dotted_no_params.find('('); paren != std::string::npos) {
        dotted_no_params.resize(paren);
    }

    std::set<std::string> permissions;
    for (const auto& [pattern, perms] : role_map) {
        const std::string& subject =
            pattern.find('(') != std::string::npos ? dotted : dotted_no_params;
        if (glob_match(pattern, subject)) {
            permissions.insert(perms.begin(), perms.end());
        }
    }

    json response;
    response["requires_permission"] = !permissions.empty();
    response["permissions"] = std::vector<std::string>(permissions.begin(), permissions.end());
    response["rationale"] = permissions.empty() ? "no oracle entry matches" : "mock oracle entry";
    return response.dump();
}

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    std::string url = config_.endpoint;
    if (url.starts_with("https://")) {
        throw PermapError(ErrorCode::config_error,
                          "https endpoints need a TLS-enabled build; use http or the mock provider");
    }
    if (!url.starts_with("http://")) {
        throw PermapError(ErrorCode::config_error, "provider endpoint must be an http:// URL");
    }
    url = url.substr(7);
    const auto slash = url.find('/');
    std::string authority = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
    const auto colon = authority.find(':');
    if (colon == std::string::npos) {
        host_ = authority;
        port_ = 80;
    } else {
        host_ = authority.substr(0, colon);
        port_ = std::atoi(authority.c_str() + colon + 1);
    }
    if (host_.empty() || port_ <= 0) {
        throw PermapError(ErrorCode::config_error, "cannot parse provider endpoint: " + config_.endpoint);
    }
}

std::string HttpProvider::complete(const std::string& prompt) {
    log_call(prompt);
    httplib::Client client(host_, port_);
    client.set_connection_timeout(static_cast<int>(config_.timeout_seconds), 0);
    client.set_read_timeout(static_cast<int>(config_.timeout_seconds), 0);

    httplib::Headers headers;
    if (const char* cred = std::getenv(config_.credential_env.c_str()); cred && *cred) {
        headers.emplace("Authorization", std::string("Bearer ") + cred);
    }

    json body;
    body["model"] = config_.model_id;
    body["prompt"] = prompt;
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
        throw PermapError(ErrorCode::provider_error,
                          "provider transport failure: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw PermapError(ErrorCode::provider_error,
                          "provider returned HTTP " + std::to_string(res->status));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_object()) {
        for (const char* key : {"output", "text", "completion", "response"}) {
            if (parsed.contains(key) && parsed[key].is_string()) {
                return parsed[key].get<std::string>();
            }
        }
    }
    return res->body;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config,
                                        const std::filesystem::path& mock_oracle) {
    if (!mock_oracle.empty() || config.provider_name == "mock") {
        if (mock_oracle.empty()) {
            throw PermapError(ErrorCode::config_error,
                              "mock provider selected but no mock oracle file configured");
        }
        return std::make_unique<MockProvider>(mock_oracle);
    }
    return std::make_unique<HttpProvider>(config);
}

namespace {

AnalysisVerdict run_role(const ApiRecord& record, Provider& provider, Role role,
                         const std::vector<Demonstration>& demos, const ProviderConfig& config) {
    const RoleProfile profile = default_role_profile(role);

    // Shed body text until the prompt fits; demonstrations stay intact.
    ApiRecord target = record;
    if (target.body_text.size() > config.body_char_budget) {
        target.body_text.resize(config.body_char_budget);
    }
    PromptBundle bundle;
    while (true) {
        try {
            bundle = build_prompt(profile, demos, target, config.prompt_char_limit);
            break;
        } catch (const PermapError& e) {
            if (e.code() != ErrorCode::prompt_error || target.body_text.empty()) throw;
            target.body_text.resize(target.body_text.size() / 2);
        }
    }

    std::string response;
    int attempt = 0;
    while (true) {
        try {
            response = provider.complete(bundle.rendered);
            break;
        } catch (const PermapError& e) {
            if (e.code() != ErrorCode::provider_error || attempt >= config.retries) throw;
            if (config.backoff_seconds > 0) {
                const auto delay = config.backoff_seconds * static_cast<double>(1 << attempt);
                std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            }
            ++attempt;
        }
    }
    return parse_verdict(response, role);
}

} // namespace

AnalyzeOutcome analyze_record(const ApiRecord& record, Provider& provider,
                              const std::vector<Demonstration>& demos,
                              const ProviderConfig& config) {
    AnalyzeOutcome out;
    try {
        out.detector = run_role(record, provider, Role::detector, demos, config);
        out.analyst = run_role(record, provider, Role::analyst, demos, config);
    } catch (const PermapError& e) {
        out.failed = true;
        out.failure = e.what();
    }
    return out;
}

AnalyzeStats analyze_store(MappingStore& store, Provider& provider,
                           const std::vector<Demonstration>& demos, const ProviderConfig& config) {
    const std::vector<ApiRecord>& records = store.records();
    std::vector<AnalyzeOutcome> outcomes(records.size());

    const int workers = std::max(1, std::min<int>(config.max_in_flight,
                                                  static_cast<int>(records.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            outcomes[i] = analyze_record(records[i], provider, demos, config);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    AnalyzeStats stats;
    stats.analyzed = records.size();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ApiRecord& r = records[i];
        const AnalyzeOutcome& o = outcomes[i];
        if (o.failed) {
            stats.failed_api_ids.push_back(r.api_id);
            continue;
        }
        store.upsert_mapping(r.api_id, r.declared_permissions, "annotation", Confidence::declared);
        store.upsert_mapping(r.api_id, o.detector.permissions, "detector", Confidence::predicted);
        store.upsert_mapping(r.api_id, o.analyst.permissions, "analyst", Confidence::predicted);
    }
    stats.permission_required = store.permission_required_count();
    return stats;
}

} // namespace permap

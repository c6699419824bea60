#pragma once

#include "core/prompts.hpp"
#include "core/store.hpp"
#include "core/verdict.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace permap {

struct ProviderConfig {
    std::string provider_name = "mock";
    std::string model_id = "mock-1";
    std::string endpoint;                 // http://host:port/path
    std::string credential_env = "PERMAP_API_KEY";
    int max_in_flight = 4;
    double timeout_seconds = 30.0;
    int retries = 2;
    double backoff_seconds = 0.5;
    std::size_t prompt_char_limit = 16000;
    std::size_t body_char_budget = 4000;
};

// One request in, one response out. Implementations must be callable from
// multiple threads. Transport failures raise a provider error.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string complete(const std::string& prompt) = 0;

    std::size_t call_count() const;
    std::vector<std::string> call_log() const;

protected:
    void log_call(const std::string& prompt);

private:
    mutable std::mutex mutex_;
    std::vector<std::string> calls_;
};

// Deterministic offline provider driven by a JSON oracle:
//   {"detector": {"<signature glob>": ["PERM", ...], ...}, "analyst": {...}}
// Globs match the target's dotted signature (with or without the parameter
// list); 32-hex keys are api_ids and are resolved against a store via
// resolve_api_ids. Responds with the strict verdict schema.
class MockProvider : public Provider {
public:
    explicit MockProvider(const std::filesystem::path& oracle_file);

    std::string complete(const std::string& prompt) override;

    // Rewrites api_id oracle keys into exact signature patterns.
    void resolve_api_ids(const MappingStore& store);

private:
    std::map<std::string, std::set<std::string>> detector_;
    std::map<std::string, std::set<std::string>> analyst_;
};

// Minimal HTTP adapter for real providers: POSTs {"model", "prompt"} with a
// bearer credential read from the configured environment variable.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig config);

    std::string complete(const std::string& prompt) override;

private:
    ProviderConfig config_;
    std::string host_;
    int port_ = 80;
    std::string path_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config,
                                        const std::filesystem::path& mock_oracle = {});

// Shell-style glob with '*' and '?', anchored at both ends.
bool glob_match(std::string_view pattern, std::string_view text);

struct AnalyzeOutcome {
    AnalysisVerdict detector;
    AnalysisVerdict analyst;
    bool failed = false;
    std::string failure;
};

// Exactly one provider call per role (plus configured transport retries).
// Over-long prompts shed body text until they fit; demonstrations are never
// truncated.
AnalyzeOutcome analyze_record(const ApiRecord& record, Provider& provider,
                              const std::vector<Demonstration>& demos,
                              const ProviderConfig& config);

struct AnalyzeStats {
    std::size_t analyzed = 0;
    std::size_t permission_required = 0;
    std::vector<std::string> failed_api_ids;
};

// Dual-role pass over every record, merged into the store (union semantics,
// annotations first). Record order of the result is independent of worker
// scheduling.
AnalyzeStats analyze_store(MappingStore& store, Provider& provider,
                           const std::vector<Demonstration>& demos, const ProviderConfig& config);

} // namespace permap

#pragma once

#include "core/snippets.hpp"
#include "core/store.hpp"
#include "core/testcase.hpp"

#include <filesystem>
#include <map>

namespace permap {

// Ground-truth enforcement table of the simulated runtime, keyed by api_id.
struct PermissionOracle {
    std::map<std::string, std::set<std::string>> entries;
};

// JSON map of `fq_class#name(paramTypes)` (or api_id) -> permission array.
// Signature keys are resolved against the store; unresolvable keys are
// reported through `warnings` and skipped.
PermissionOracle load_permission_oracle(const std::filesystem::path& file, const MappingStore& store,
                                        std::vector<std::string>* warnings = nullptr);

enum class ExecResult { completed, security_exception, harness_error };

struct ExecutionOutcome {
    std::string case_id;
    ExecResult result = ExecResult::completed;
    std::string exception_message;
    std::set<std::string> extracted_permissions;  // derived only from the message
};

// Simulated permission enforcement: with R the oracle's required set and G
// the case's granted manifest, R ⊆ G completes; otherwise a security
// exception names exactly R∖G in sorted order. An api_id the oracle does not
// know is unenforced and completes.
ExecutionOutcome execute_simulated(const TestCase& tc, const PermissionOracle& oracle,
                                   const MappingStore& store);

// Every token matching the permission grammar, canonicalized. Total.
std::set<std::string> parse_security_exception(const std::string& message);

struct VerifyResult {
    bool verified = false;
    std::string flag;  // "", "unverifiable" or "no_evidence"
};

// Confirms a candidate mapping from simulated execution evidence: permissions
// named by the exception gain `verified` provenance (new ones are added, none
// are ever removed). A rejected or blocked test case leaves the mapping
// predicted and flagged unverifiable; an empty evidence set flags it
// no_evidence.
VerifyResult verify_mapping(PermissionMapping& mapping, const TestCase& tc,
                            const PermissionOracle& oracle, const MappingStore& store);

struct VerifyStats {
    std::size_t candidates = 0;
    std::size_t verified = 0;
    std::vector<std::string> rejected_api_ids;      // refinement exhausted
    std::vector<std::string> unverified_api_ids;    // no evidence or blocked
};

// Full retrieve -> generate -> validate -> refine -> execute -> confirm pass
// over every candidate mapping (or the first `sample_limit` by api_id when
// positive).
VerifyStats verify_store(MappingStore& store, const std::vector<SnippetCorpusEntry>& snippets,
                         TestCaseGenerator& generator, TestCaseRefiner& refiner,
                         const PermissionOracle& oracle, int max_iterations,
                         double similarity_threshold, std::size_t sample_limit = 0,
                         const std::vector<std::string>& banned_tokens = default_banned_tokens());

struct DeviceBundle {
    std::string case_id;
    std::filesystem::path directory;
};

// Emits, per validated test case, a standalone client-app source file plus a
// run manifest (target SDK, grant list, expected exception substring) for
// execution on real tooling.
std::vector<DeviceBundle> export_device_bundles(const MappingStore& store,
                                                const std::vector<SnippetCorpusEntry>& snippets,
                                                TestCaseGenerator& generator,
                                                TestCaseRefiner& refiner, int max_iterations,
                                                double similarity_threshold,
                                                const std::filesystem::path& out_dir);

} // namespace permap

#pragma once

#include "core/snippets.hpp"
#include "core/store.hpp"

#include <string>
#include <utility>
#include <vector>

namespace permap {

class Provider;

enum class CaseStatus { draft, validated, rejected };

struct TestCase {
    std::string case_id;
    std::string api_id;
    std::string code;
    std::set<std::string> manifest_permissions;  // grants of the simulated client app
    int sdk_version = 0;
    CaseStatus status = CaseStatus::draft;
    std::vector<std::pair<int, std::vector<std::string>>> refinement_history;
    std::string source_snippet_id;  // provenance when derived from a retrieved entry
    bool harness_blocked = false;
};

// Produces the draft code for a test case.
class TestCaseGenerator {
public:
    virtual ~TestCaseGenerator() = default;
    virtual std::string generate(const ApiRecord& record, const SnippetCorpusEntry* retrieved) = 0;
};

// Deterministic generator: one top-level invocation of the target signature
// with default argument literals. A retrieved entry is normalized to the same
// self-contained shape and noted as provenance.
class TemplateGenerator : public TestCaseGenerator {
public:
    std::string generate(const ApiRecord& record, const SnippetCorpusEntry* retrieved) override;
};

// LLM-backed generator; falls back to a harness-blocked draft after the
// transport retries are exhausted.
class ProviderGenerator : public TestCaseGenerator {
public:
    ProviderGenerator(Provider& provider, int retries) : provider_(provider), retries_(retries) {}
    std::string generate(const ApiRecord& record, const SnippetCorpusEntry* retrieved) override;

private:
    Provider& provider_;
    int retries_;
};

// Default literal for a parameter type: 0 for numbers, "" for String, false
// for booleans, null otherwise.
std::string default_literal(const std::string& param_type);

std::string case_class_name(const ApiRecord& record);

// Draft with empty manifest so missing-permission behavior is exercised
// first. A generator failure yields a harness-blocked draft.
TestCase generate_test_case(const ApiRecord& record, TestCaseGenerator& generator,
                            const SnippetCorpusEntry* retrieved);

const std::vector<std::string>& default_banned_tokens();

// Self-containment rules, each producing a named violation:
//   entry-point        exactly one `public static void main`
//   target-invocation  exactly one store-API call, and it is the target
//   allowlist          no identifiers beyond the target, literals and hooks
//   sdk-alignment      target exists in the store for tc.sdk_version
//   banned-reference   no file or network identifiers
std::vector<std::string> validate_test_case(const TestCase& tc, const MappingStore& store,
                                            const std::vector<std::string>& banned_tokens =
                                                default_banned_tokens());

// Rewrites a draft's code from validation feedback. `record` is null when the
// target is unknown to the store.
class TestCaseRefiner {
public:
    virtual ~TestCaseRefiner() = default;
    virtual std::string refine(const TestCase& tc, const std::vector<std::string>& violations,
                               const ApiRecord* record) = 0;
};

// Regenerates the canonical template, discarding whatever broke the draft.
class TemplateRefiner : public TestCaseRefiner {
public:
    std::string refine(const TestCase& tc, const std::vector<std::string>& violations,
                       const ApiRecord* record) override;
};

// Feeds the violation report back to the LLM. Exhausted transport retries
// leave the code unchanged and the loop bound rejects the case.
class ProviderRefiner : public TestCaseRefiner {
public:
    ProviderRefiner(Provider& provider, int retries) : provider_(provider), retries_(retries) {}
    std::string refine(const TestCase& tc, const std::vector<std::string>& violations,
                       const ApiRecord* record) override;

private:
    Provider& provider_;
    int retries_;
};

// Bounded feedback loop: each round-trip appends (iteration, violations) to
// the history; the first clean report validates, exhaustion rejects.
TestCase refine_loop(TestCase tc, const MappingStore& store, TestCaseRefiner& refiner,
                     int max_iterations,
                     const std::vector<std::string>& banned_tokens = default_banned_tokens());

} // namespace permap

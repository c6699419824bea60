#include "core/errors.hpp"
#include "core/extractor.hpp"
#include "core/provider.hpp"
#include "core/simulator.hpp"
#include "core/snippets.hpp"
#include "core/store.hpp"
#include "core/testcase.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace permap;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PERMAP_FIXTURES_DIR;

MappingStore fixture_store() {
    ScanOutput out = scan_corpus(load_corpus_manifest(kFixtures / "corpus.json"));
    MappingStore store("fixture15", 15);
    for (auto& r : out.records) store.add_record(std::move(r));
    return store;
}

ApiRecord fixture_record(const MappingStore& store, const std::string& name) {
    for (const auto& r : store.records()) {
        if (r.signature.name == name) return r;
    }
    FAIL("fixture record not found: ", name);
    return {};
}

// Test double that never repairs anything.
class AdversarialRefiner : public TestCaseRefiner {
public:
    std::string refine(const TestCase& tc, const std::vector<std::string>&,
                       const ApiRecord*) override {
        return tc.code;
    }
};

// Brute-force retrieval oracle, independent of retrieve_snippet.
const SnippetCorpusEntry* brute_force_best(const std::set<std::string>& tokens,
                                           const std::vector<SnippetCorpusEntry>& corpus,
                                           double threshold) {
    const SnippetCorpusEntry* best = nullptr;
    double best_score = -1.0;
    for (const auto& e : corpus) {
        std::size_t inter = 0;
        for (const auto& t : tokens) inter += e.target_signature_tokens.contains(t) ? 1 : 0;
        const std::size_t uni = tokens.size() + e.target_signature_tokens.size() - inter;
        const double score = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
        if (score > best_score) {
            best = &e;
            best_score = score;
        } else if (score == best_score && best && e.snippet_id < best->snippet_id) {
            best = &e;
        }
    }
    return best_score >= threshold ? best : nullptr;
}

} // namespace

TEST_CASE("signature tokens split camel case and lowercase") {
    MethodSignature sig;
    sig.fq_class = "android.net.ConnectivityChecker";
    sig.name = "isInternetConnected";
    CHECK(signature_tokens(sig) == std::set<std::string>{"android", "net", "connectivity",
                                                         "checker", "is", "internet", "connected"});
}

TEST_CASE("retrieve_snippet returns the identity match at similarity 1.0") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isInternetConnected");
    const auto corpus = load_snippet_corpus(kFixtures / "snippets");
    const SnippetCorpusEntry* entry = retrieve_snippet(record, corpus, 0.6);
    REQUIRE(entry);
    CHECK(entry->snippet_id == "snip-internet-001");
}

TEST_CASE("retrieve_snippet returns nothing on an empty corpus or below threshold") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isInternetConnected");
    CHECK(retrieve_snippet(record, {}, 0.6) == nullptr);

    std::vector<SnippetCorpusEntry> weak = {{"snip-x", {"totally", "unrelated"}, "", ""}};
    CHECK(retrieve_snippet(record, weak, 0.6) == nullptr);
}

TEST_CASE("retrieval ties break to the smallest snippet_id") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isInternetConnected");
    const std::set<std::string> tokens = signature_tokens(record.signature);
    REQUIRE(tokens.size() == 7);

    SUBCASE("exact tie at similarity 1.0") {
        std::vector<SnippetCorpusEntry> corpus = {
            {"snip-b", tokens, "", ""},
            {"snip-a", tokens, "", ""},
        };
        const SnippetCorpusEntry* entry = retrieve_snippet(record, corpus, 0.6);
        REQUIRE(entry);
        CHECK(entry->snippet_id == "snip-a");
        CHECK(brute_force_best(tokens, corpus, 0.6)->snippet_id == "snip-a");
    }
    SUBCASE("partial-overlap tie below 1.0") {
        // Both entries share six of the seven record tokens plus one foreign
        // token: similarity 6/8 = 0.75 each.
        std::set<std::string> six_a(tokens);
        six_a.erase("internet");
        six_a.insert("probe");
        std::set<std::string> six_b(tokens);
        six_b.erase("checker");
        six_b.insert("gauge");
        std::vector<SnippetCorpusEntry> corpus = {
            {"snip-late", six_a, "", ""},
            {"snip-early", six_b, "", ""},
        };
        CHECK(jaccard(tokens, six_a) == doctest::Approx(0.75));
        CHECK(jaccard(tokens, six_b) == doctest::Approx(0.75));
        const SnippetCorpusEntry* entry = retrieve_snippet(record, corpus, 0.6);
        REQUIRE(entry);
        CHECK(entry->snippet_id == "snip-early");
        CHECK(brute_force_best(tokens, corpus, 0.6)->snippet_id == "snip-early");
    }
}

TEST_CASE("retrieve_snippet agrees with brute force on randomized corpora") {
    std::mt19937 rng(555);
    const std::vector<std::string> vocab = {"net",  "wifi", "scan",  "open", "read",
                                            "file", "gps",  "audio", "mic",  "record",
                                            "lock", "usb",  "nfc",   "send", "text"};
    MappingStore store = fixture_store();
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<SnippetCorpusEntry> corpus;
        const int n = static_cast<int>(rng() % 500);
        for (int i = 0; i < n; ++i) {
            SnippetCorpusEntry e;
            e.snippet_id = "snip-" + std::to_string(rng() % 1000);
            const int k = 1 + static_cast<int>(rng() % 6);
            for (int t = 0; t < k; ++t) e.target_signature_tokens.insert(vocab[rng() % vocab.size()]);
            corpus.push_back(std::move(e));
        }
        const ApiRecord record = fixture_record(store, "isGPSEnabled");
        const auto tokens = signature_tokens(record.signature);
        const SnippetCorpusEntry* got = retrieve_snippet(record, corpus, 0.3);
        const SnippetCorpusEntry* want = brute_force_best(tokens, corpus, 0.3);
        if (want == nullptr) {
            CHECK(got == nullptr);
        } else {
            REQUIRE(got);
            CHECK(got->snippet_id == want->snippet_id);
        }
    }
}

TEST_CASE("generated drafts invoke the target once with an empty manifest") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    const TestCase tc = generate_test_case(record, generator, nullptr);
    CHECK(tc.status == CaseStatus::draft);
    CHECK(tc.manifest_permissions.empty());
    CHECK(tc.api_id == record.api_id);
    CHECK(tc.code.find("android.location.LocationProvider.isGPSEnabled()") != std::string::npos);
    CHECK(tc.code.find("public static void main") != std::string::npos);
}

TEST_CASE("drafts derived from a retrieved entry note the snippet id") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isInternetConnected");
    const auto corpus = load_snippet_corpus(kFixtures / "snippets");
    const SnippetCorpusEntry* entry = retrieve_snippet(record, corpus, 0.6);
    REQUIRE(entry);
    TemplateGenerator generator;
    const TestCase tc = generate_test_case(record, generator, entry);
    CHECK(tc.source_snippet_id == "snip-internet-001");
    CHECK(tc.code.find("snip-internet-001") != std::string::npos);
}

TEST_CASE("parameterized targets get default literals") {
    MappingStore store("params", 15);
    ApiRecord r;
    r.signature.fq_class = "a.b.C";
    r.signature.name = "call";
    r.signature.param_types = {"int", "String"};
    r.signature.return_type = "void";
    r.api_id = make_api_id("params", r.signature);
    r.api_level = 15;
    r.file_path = "C.java";
    r.line = 1;
    r.top_package = "a";
    store.add_record(r);

    TemplateGenerator generator;
    const TestCase tc = generate_test_case(r, generator, nullptr);
    CHECK(tc.code.find("a.b.C.call(0, \"\");") != std::string::npos);
}

TEST_CASE("validate_test_case passes a compliant draft") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    const TestCase tc = generate_test_case(record, generator, nullptr);
    CHECK(validate_test_case(tc, store).empty());
}

TEST_CASE("validate_test_case flags a second SDK invocation") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    TestCase tc = generate_test_case(record, generator, nullptr);
    tc.code.insert(tc.code.rfind("    }"),
                   "        android.net.ConnectivityChecker.isInternetConnected();\n");
    const auto violations = validate_test_case(tc, store);
    bool flagged = false;
    for (const auto& v : violations) flagged |= v.find("target-invocation") != std::string::npos;
    CHECK(flagged);
}

TEST_CASE("validate_test_case flags a target missing from the SDK store") {
    MappingStore store = fixture_store();
    TestCase tc;
    tc.api_id = "0000000000000000000000000000dead";
    tc.sdk_version = 15;
    tc.code = "public class PermCase_00000000 { public static void main(String[] args) { } }";
    const auto violations = validate_test_case(tc, store);
    bool flagged = false;
    for (const auto& v : violations) flagged |= v.find("sdk-alignment") != std::string::npos;
    CHECK(flagged);
}

TEST_CASE("validate_test_case flags banned references and stray identifiers") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    TestCase tc = generate_test_case(record, generator, nullptr);
    tc.code.insert(tc.code.rfind("    }"),
                   "        java.io.File f = new java.io.File(\"/tmp/x\");\n");
    const auto violations = validate_test_case(tc, store);
    bool banned = false;
    bool allowlist = false;
    for (const auto& v : violations) {
        banned |= v.find("banned-reference") != std::string::npos;
        allowlist |= v.find("allowlist") != std::string::npos;
    }
    CHECK(banned);
    CHECK(allowlist);
}

TEST_CASE("validate_test_case requires exactly one entry point") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    TestCase tc = generate_test_case(record, generator, nullptr);
    tc.code += "\nclass Extra { public static void main(String[] args) { } }\n";
    const auto violations = validate_test_case(tc, store);
    bool flagged = false;
    for (const auto& v : violations) flagged |= v.find("entry-point") != std::string::npos;
    CHECK(flagged);
}

TEST_CASE("refine_loop validates a fixable draft in one iteration") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    TestCase tc = generate_test_case(record, generator, nullptr);
    tc.code.insert(tc.code.rfind("    }"), "        rogueHelper();\n");
    REQUIRE_FALSE(validate_test_case(tc, store).empty());

    TemplateRefiner refiner;
    const TestCase refined = refine_loop(std::move(tc), store, refiner, 3);
    CHECK(refined.status == CaseStatus::validated);
    REQUIRE(refined.refinement_history.size() == 1);
    CHECK(refined.refinement_history[0].first == 1);
    CHECK_FALSE(refined.refinement_history[0].second.empty());
}

TEST_CASE("refine_loop rejects after max_iterations of failed refinement") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    TestCase tc = generate_test_case(record, generator, nullptr);
    tc.code.insert(tc.code.rfind("    }"), "        rogueHelper();\n");

    AdversarialRefiner adversarial;
    const TestCase rejected = refine_loop(std::move(tc), store, adversarial, 3);
    CHECK(rejected.status == CaseStatus::rejected);
    CHECK(rejected.refinement_history.size() == 3);
}

TEST_CASE("refine_loop leaves already-valid drafts untouched") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator generator;
    TestCase tc = generate_test_case(record, generator, nullptr);
    const std::string original = tc.code;

    AdversarialRefiner adversarial;
    const TestCase done = refine_loop(std::move(tc), store, adversarial, 3);
    CHECK(done.status == CaseStatus::validated);
    CHECK(done.refinement_history.empty());
    CHECK(done.code == original);
}

TEST_CASE("execute_simulated raises a security exception naming missing permissions") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "startRecording");
    PermissionOracle oracle;
    oracle.entries[record.api_id] = {"android.permission.CAMERA",
                                     "android.permission.RECORD_AUDIO"};

    TemplateGenerator generator;
    TestCase tc = generate_test_case(record, generator, nullptr);
    TemplateRefiner refiner;
    tc = refine_loop(std::move(tc), store, refiner, 3);
    REQUIRE(tc.status == CaseStatus::validated);

    SUBCASE("empty grant set names the full required set") {
        const ExecutionOutcome outcome = execute_simulated(tc, oracle, store);
        CHECK(outcome.result == ExecResult::security_exception);
        CHECK(outcome.exception_message ==
              "SecurityException: android.hardware.CameraService.startRecording requires "
              "android.permission.CAMERA, android.permission.RECORD_AUDIO");
        CHECK(outcome.extracted_permissions ==
              std::set<std::string>{"android.permission.CAMERA",
                                    "android.permission.RECORD_AUDIO"});
    }
    SUBCASE("partial grant names only the difference") {
        tc.manifest_permissions = {"android.permission.CAMERA"};
        const ExecutionOutcome outcome = execute_simulated(tc, oracle, store);
        CHECK(outcome.result == ExecResult::security_exception);
        CHECK(outcome.exception_message.find("RECORD_AUDIO") != std::string::npos);
        CHECK(outcome.exception_message.find("CAMERA,") == std::string::npos);
        CHECK(outcome.extracted_permissions ==
              std::set<std::string>{"android.permission.RECORD_AUDIO"});
    }
    SUBCASE("satisfied grant completes silently") {
        tc.manifest_permissions = {"android.permission.CAMERA", "android.permission.RECORD_AUDIO"};
        const ExecutionOutcome outcome = execute_simulated(tc, oracle, store);
        CHECK(outcome.result == ExecResult::completed);
        CHECK(outcome.exception_message.empty());
    }
    SUBCASE("oracle silence means unenforced") {
        PermissionOracle empty;
        const ExecutionOutcome outcome = execute_simulated(tc, empty, store);
        CHECK(outcome.result == ExecResult::completed);
    }
    SUBCASE("non-validated cases are harness errors") {
        TestCase draft = generate_test_case(record, generator, nullptr);
        const ExecutionOutcome outcome = execute_simulated(draft, oracle, store);
        CHECK(outcome.result == ExecResult::harness_error);
    }
}

TEST_CASE("parse_security_exception extracts grammar tokens only") {
    CHECK(parse_security_exception(
              "requires android.permission.INTERNET or be running as root") ==
          std::set<std::string>{"android.permission.INTERNET"});
    CHECK(parse_security_exception("NullPointerException").empty());
    CHECK(parse_security_exception(
              "SecurityException: a.B.c requires com.vendor.permission.PAY") ==
          std::set<std::string>{"com.vendor.permission.PAY"});
}

TEST_CASE("verify_mapping confirms, extends and flags mappings") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "openCamera");
    TemplateGenerator generator;
    TemplateRefiner refiner;
    TestCase tc = generate_test_case(record, generator, nullptr);
    tc = refine_loop(std::move(tc), store, refiner, 3);
    REQUIRE(tc.status == CaseStatus::validated);

    SUBCASE("intersection is verified") {
        PermissionMapping mapping;
        mapping.api_id = record.api_id;
        mapping.permissions = {"android.permission.CAMERA"};
        mapping.provenance = {"detector"};
        mapping.confidence = Confidence::predicted;
        PermissionOracle oracle;
        oracle.entries[record.api_id] = {"android.permission.CAMERA"};
        const VerifyResult result = verify_mapping(mapping, tc, oracle, store);
        CHECK(result.verified);
        CHECK(mapping.confidence == Confidence::verified);
        CHECK(mapping.provenance.contains("verified"));
    }
    SUBCASE("silent oracle leaves the mapping predicted and flagged") {
        PermissionMapping mapping;
        mapping.api_id = record.api_id;
        mapping.permissions = {"android.permission.CAMERA"};
        mapping.provenance = {"detector"};
        mapping.confidence = Confidence::predicted;
        const PermissionOracle empty;
        const VerifyResult result = verify_mapping(mapping, tc, empty, store);
        CHECK_FALSE(result.verified);
        CHECK(mapping.confidence == Confidence::predicted);
        CHECK(mapping.verify_flag == "no_evidence");
    }
    SUBCASE("evidence beyond the candidate is added as verified") {
        PermissionMapping mapping;
        mapping.api_id = record.api_id;
        mapping.permissions = {"android.permission.CAMERA"};
        mapping.provenance = {"detector"};
        mapping.confidence = Confidence::predicted;
        PermissionOracle oracle;
        oracle.entries[record.api_id] = {"android.permission.CAMERA",
                                         "android.permission.RECORD_AUDIO"};
        verify_mapping(mapping, tc, oracle, store);
        CHECK(mapping.permissions == std::set<std::string>{"android.permission.CAMERA",
                                                           "android.permission.RECORD_AUDIO"});
        CHECK(mapping.confidence == Confidence::verified);
    }
    SUBCASE("rejected test case flags the mapping unverifiable") {
        PermissionMapping mapping;
        mapping.api_id = record.api_id;
        mapping.permissions = {"android.permission.CAMERA"};
        mapping.provenance = {"detector"};
        mapping.confidence = Confidence::predicted;
        TestCase rejected = tc;
        rejected.status = CaseStatus::rejected;
        PermissionOracle oracle;
        oracle.entries[record.api_id] = {"android.permission.CAMERA"};
        const VerifyResult result = verify_mapping(mapping, rejected, oracle, store);
        CHECK_FALSE(result.verified);
        CHECK(mapping.verify_flag == "unverifiable");
        CHECK(mapping.confidence == Confidence::predicted);
    }
}

TEST_CASE("verify_mapping never shrinks the permission set") {
    MappingStore store = fixture_store();
    TemplateGenerator generator;
    TemplateRefiner refiner;
    std::mt19937 rng(8888);
    const std::vector<std::string> pool = {
        "android.permission.CAMERA", "android.permission.RECORD_AUDIO",
        "android.permission.INTERNET", "android.permission.NFC"};
    const auto& records = store.records();
    for (int trial = 0; trial < 60; ++trial) {
        const ApiRecord& record = records[rng() % records.size()];
        PermissionMapping mapping;
        mapping.api_id = record.api_id;
        mapping.provenance = {"detector"};
        mapping.confidence = Confidence::predicted;
        for (const auto& p : pool) {
            if (rng() % 2) mapping.permissions.insert(p);
        }
        if (mapping.permissions.empty()) mapping.permissions.insert(pool[0]);
        const std::set<std::string> before = mapping.permissions;

        PermissionOracle oracle;
        if (rng() % 3) {
            std::set<std::string> required;
            for (const auto& p : pool) {
                if (rng() % 2) required.insert(p);
            }
            if (!required.empty()) oracle.entries[record.api_id] = required;
        }
        TestCase tc = generate_test_case(record, generator, nullptr);
        tc = refine_loop(std::move(tc), store, refiner, 3);
        verify_mapping(mapping, tc, oracle, store);
        for (const auto& p : before) CHECK(mapping.permissions.contains(p));
    }
}

TEST_CASE("exception round-trip equals the missing set on random oracles") {
    MappingStore store = fixture_store();
    TemplateGenerator generator;
    TemplateRefiner refiner;
    std::mt19937 rng(90210);
    const std::vector<std::string> pool = {
        "android.permission.CAMERA",        "android.permission.RECORD_AUDIO",
        "android.permission.INTERNET",      "android.permission.ACCESS_FINE_LOCATION",
        "com.vendor.permission.PAY",        "android.permission.NFC",
    };
    const auto& records = store.records();
    for (int trial = 0; trial < 100; ++trial) {
        const ApiRecord& record = records[rng() % records.size()];
        std::set<std::string> required;
        const int k = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < k; ++i) required.insert(pool[rng() % pool.size()]);
        std::set<std::string> granted;
        for (const auto& p : required) {
            if (rng() % 2) granted.insert(p);
        }
        PermissionOracle oracle;
        oracle.entries[record.api_id] = required;

        TestCase tc = generate_test_case(record, generator, nullptr);
        tc = refine_loop(std::move(tc), store, refiner, 3);
        REQUIRE(tc.status == CaseStatus::validated);
        tc.manifest_permissions = granted;

        std::set<std::string> missing;
        for (const auto& p : required) {
            if (!granted.contains(p)) missing.insert(p);
        }
        const ExecutionOutcome outcome = execute_simulated(tc, oracle, store);
        CHECK(parse_security_exception(outcome.exception_message) == missing);
    }
}

TEST_CASE("verify_store closes the loop over the fixture ground truth") {
    MappingStore store = fixture_store();
    // Candidate mappings straight from the execution oracle's table.
    std::vector<std::string> warnings;
    const PermissionOracle oracle =
        load_permission_oracle(kFixtures / "exec_oracle.json", store, &warnings);
    CHECK(warnings.empty());
    for (const auto& [api_id, perms] : oracle.entries) {
        store.upsert_mapping(api_id, perms, "detector", Confidence::predicted);
    }

    TemplateGenerator generator;
    TemplateRefiner refiner;
    const auto snippets = load_snippet_corpus(kFixtures / "snippets");
    const VerifyStats stats = verify_store(store, snippets, generator, refiner, oracle, 3, 0.6);
    CHECK(stats.candidates == 7);
    CHECK(stats.verified == 7);
    CHECK(stats.rejected_api_ids.empty());

    for (const auto& [api_id, mapping] : store.mappings()) {
        CHECK(mapping.confidence == Confidence::verified);
        // Verified evidence never leaves the oracle's entry.
        for (const auto& p : mapping.permissions) {
            CHECK(oracle.entries.at(api_id).contains(p));
        }
    }
}

TEST_CASE("verify_store honors the sampling limit") {
    MappingStore store = fixture_store();
    std::vector<std::string> warnings;
    const PermissionOracle oracle =
        load_permission_oracle(kFixtures / "exec_oracle.json", store, &warnings);
    for (const auto& [api_id, perms] : oracle.entries) {
        store.upsert_mapping(api_id, perms, "detector", Confidence::predicted);
    }
    TemplateGenerator generator;
    TemplateRefiner refiner;
    const VerifyStats stats = verify_store(store, {}, generator, refiner, oracle, 3, 0.6, 2);
    CHECK(stats.candidates == 2);
    CHECK(stats.verified == 2);
}

namespace {

// Scripted LLM stand-in for generator/refiner paths.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}

    std::string complete(const std::string& prompt) override {
        log_call(prompt);
        if (next_ >= responses_.size()) {
            throw PermapError(ErrorCode::provider_error, "script exhausted");
        }
        return responses_[next_++];
    }

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
};

} // namespace

TEST_CASE("provider-backed generation strips code fences and survives retries") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");

    const std::string fenced =
        "```java\npublic class PermCase_" + record.api_id.substr(0, 8) +
        " {\n    public static void main(String[] args) {\n"
        "        android.location.LocationProvider.isGPSEnabled();\n    }\n}\n```";
    ScriptedProvider provider({fenced});
    ProviderGenerator generator(provider, 2);
    const TestCase tc = generate_test_case(record, generator, nullptr);
    CHECK_FALSE(tc.harness_blocked);
    CHECK(tc.code.find("```") == std::string::npos);
    CHECK(validate_test_case(tc, store).empty());

    ScriptedProvider dead({});
    ProviderGenerator blocked_generator(dead, 1);
    const TestCase blocked = generate_test_case(record, blocked_generator, nullptr);
    CHECK(blocked.harness_blocked);
}

TEST_CASE("provider-backed refinement feeds violations back to the model") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    TemplateGenerator template_generator;
    TestCase tc = generate_test_case(record, template_generator, nullptr);
    const std::string fixed = tc.code;
    tc.code.insert(tc.code.rfind("    }"), "        rogueHelper();\n");

    ScriptedProvider provider({fixed});
    ProviderRefiner refiner(provider, 1);
    const TestCase done = refine_loop(std::move(tc), store, refiner, 3);
    CHECK(done.status == CaseStatus::validated);
    CHECK(done.refinement_history.size() == 1);
    REQUIRE(provider.call_count() == 1);
    const std::string prompt = provider.call_log()[0];
    CHECK(prompt.find("rogueHelper") != std::string::npos);  // feedback included
    CHECK(prompt.find("Violations:") != std::string::npos);

    // A dead provider leaves the code unchanged and the loop rejects.
    TestCase broken = generate_test_case(record, template_generator, nullptr);
    broken.code.insert(broken.code.rfind("    }"), "        rogueHelper();\n");
    ScriptedProvider dead({});
    ProviderRefiner dead_refiner(dead, 0);
    const TestCase rejected = refine_loop(std::move(broken), store, dead_refiner, 3);
    CHECK(rejected.status == CaseStatus::rejected);
    CHECK(rejected.refinement_history.size() == 3);
}

TEST_CASE("export_device_bundles writes one bundle per validated case") {
    MappingStore store = fixture_store();
    std::vector<std::string> warnings;
    const PermissionOracle oracle =
        load_permission_oracle(kFixtures / "exec_oracle.json", store, &warnings);
    for (const auto& [api_id, perms] : oracle.entries) {
        store.upsert_mapping(api_id, perms, "detector", Confidence::predicted);
    }
    TemplateGenerator generator;
    TemplateRefiner refiner;
    const fs::path out = fs::temp_directory_path() / "permap_bundles_test";
    fs::remove_all(out);
    const auto bundles = export_device_bundles(store, {}, generator, refiner, 3, 0.6, out);
    CHECK(bundles.size() == 7);
    for (const auto& b : bundles) {
        CHECK(fs::exists(b.directory / "run_manifest.json"));
        bool has_source = false;
        for (const auto& f : fs::directory_iterator(b.directory)) {
            has_source |= f.path().extension() == ".java";
        }
        CHECK(has_source);
    }
}

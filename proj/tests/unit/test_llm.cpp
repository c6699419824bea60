#include "core/errors.hpp"
#include "core/extractor.hpp"
#include "core/prompts.hpp"
#include "core/provider.hpp"
#include "core/store.hpp"
#include "core/verdict.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

using namespace permap;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PERMAP_FIXTURES_DIR;

ApiRecord fixture_record(const MappingStore& store, const std::string& name) {
    for (const auto& r : store.records()) {
        if (r.signature.name == name) return r;
    }
    FAIL("fixture record not found: ", name);
    return {};
}

MappingStore fixture_store() {
    ScanOutput out = scan_corpus(load_corpus_manifest(kFixtures / "corpus.json"));
    MappingStore store("fixture15", 15);
    for (auto& r : out.records) store.add_record(std::move(r));
    return store;
}

ProviderConfig test_provider_config() {
    ProviderConfig pc;
    pc.max_in_flight = 1;
    pc.backoff_seconds = 0.0;
    return pc;
}

// Fails with a transport error a fixed number of times, then answers.
class FlakyProvider : public Provider {
public:
    FlakyProvider(int failures, std::string response)
        : failures_(failures), response_(std::move(response)) {}

    std::string complete(const std::string& prompt) override {
        log_call(prompt);
        if (failures_-- > 0) {
            throw PermapError(ErrorCode::provider_error, "synthetic transport failure");
        }
        return response_;
    }

private:
    std::atomic<int> failures_;
    std::string response_;
};

} // namespace

TEST_CASE("role profiles carry the dual-role charges") {
    const RoleProfile detector = default_role_profile(Role::detector);
    CHECK(detector.instruction.find("Permission Detector") != std::string::npos);

    const RoleProfile analyst = default_role_profile(Role::analyst);
    for (const char* category : {"Hardware Access", "Network Access", "Storage Access",
                                 "Location Access", "Media Access", "System Tools"}) {
        CHECK(analyst.instruction.find(category) != std::string::npos);
    }
}

TEST_CASE("default demonstrations cover required and free cases") {
    const auto& demos = default_demonstrations();
    REQUIRE(demos.size() == 4);
    int required = 0;
    for (const auto& d : demos) required += d.permission_required ? 1 : 0;
    CHECK(required == 3);
    CHECK(demos[1].code_snippet.find("hasLocationPermission") != std::string::npos);
    CHECK(demos[2].code_snippet.find("isGPSEnabled") != std::string::npos);
}

TEST_CASE("build_prompt renders instruction, demos, target and directive in order") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "hasLocationPermission");
    const PromptBundle bundle = build_prompt(default_role_profile(Role::detector),
                                             default_demonstrations(), record, 16000);

    const std::string& text = bundle.rendered;
    const auto pos_instruction = text.find("Permission Detector");
    const auto pos_demo1 = text.find("Demonstration 1");
    const auto pos_demo4 = text.find("Demonstration 4");
    const auto pos_target = text.find("Target method (SDK 15): "
                                      "android.location.LocationProvider.hasLocationPermission()");
    const auto pos_directive = text.find("Respond with exactly one JSON object");
    REQUIRE(pos_instruction != std::string::npos);
    REQUIRE(pos_demo1 != std::string::npos);
    REQUIRE(pos_demo4 != std::string::npos);
    REQUIRE(pos_target != std::string::npos);
    REQUIRE(pos_directive != std::string::npos);
    CHECK(pos_instruction < pos_demo1);
    CHECK(pos_demo1 < pos_demo4);
    CHECK(pos_demo4 < pos_target);
    CHECK(pos_target < pos_directive);

    // Byte determinism.
    const PromptBundle again = build_prompt(default_role_profile(Role::detector),
                                            default_demonstrations(), record, 16000);
    CHECK(bundle.rendered == again.rendered);
}

TEST_CASE("load_demonstrations reads the replaceable demo file") {
    const auto demos = load_demonstrations(kFixtures / "demos.json");
    REQUIRE(demos.size() == 3);
    CHECK(demos[0].permission_required);
    CHECK(demos[0].permissions == std::set<std::string>{"android.permission.BODY_SENSORS"});
    CHECK(demos[1].permissions ==
          std::set<std::string>{"android.permission.ACCESS_FINE_LOCATION"});  // canonicalized
    CHECK_FALSE(demos[2].permission_required);

    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    const PromptBundle bundle =
        build_prompt(default_role_profile(Role::analyst), demos, record, 16000);
    CHECK(bundle.rendered.find("readHeartRate") != std::string::npos);
    CHECK(bundle.rendered.find("wordCount") != std::string::npos);
}

TEST_CASE("load_demonstrations rejects malformed files") {
    const fs::path bad = fs::temp_directory_path() / "permap_bad_demos.json";
    {
        std::ofstream out(bad);
        out << R"([{"code": "x", "label": "required", "permissions": []}])";
    }
    CHECK_THROWS_AS(load_demonstrations(bad), PermapError);
    CHECK_THROWS_AS(load_demonstrations(kFixtures / "missing_demos.json"), PermapError);
}

TEST_CASE("build_prompt enforces the demonstration invariants") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    CHECK_THROWS_AS(build_prompt(default_role_profile(Role::detector), {}, record, 16000),
                    PermapError);

    std::vector<Demonstration> only_required = {default_demonstrations()[0]};
    CHECK_THROWS_AS(
        build_prompt(default_role_profile(Role::detector), only_required, record, 16000),
        PermapError);
}

TEST_CASE("build_prompt rejects renderings over the limit") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "isGPSEnabled");
    CHECK_THROWS_AS(
        build_prompt(default_role_profile(Role::detector), default_demonstrations(), record, 100),
        PermapError);
}

TEST_CASE("parse_verdict strict path reads the JSON schema") {
    const AnalysisVerdict v = parse_verdict(
        R"({"requires_permission":true,"permissions":["android.permission.INTERNET"],"rationale":"opens socket"})",
        Role::detector);
    CHECK(v.strict_parse);
    CHECK(v.requires_permission);
    CHECK(v.permissions == std::set<std::string>{"android.permission.INTERNET"});
    CHECK(v.rationale == "opens socket");
}

TEST_CASE("parse_verdict falls back to a token scan on prose") {
    const AnalysisVerdict v = parse_verdict(
        "This method needs android.permission.ACCESS_FINE_LOCATION.", Role::analyst);
    CHECK_FALSE(v.strict_parse);
    CHECK(v.requires_permission);
    CHECK(v.permissions == std::set<std::string>{"android.permission.ACCESS_FINE_LOCATION"});
}

TEST_CASE("parse_verdict handles permission-free and empty responses") {
    const AnalysisVerdict free_verdict =
        parse_verdict(R"({"requires_permission":false,"permissions":[]})", Role::detector);
    CHECK(free_verdict.strict_parse);
    CHECK_FALSE(free_verdict.requires_permission);
    CHECK(free_verdict.permissions.empty());

    const AnalysisVerdict empty_verdict = parse_verdict("", Role::detector);
    CHECK_FALSE(empty_verdict.requires_permission);
    CHECK(empty_verdict.parse_warning);
}

TEST_CASE("parse_verdict never throws on random bytes") {
    std::mt19937 rng(31337);
    for (int i = 0; i < 2000; ++i) {
        std::string raw;
        const int len = static_cast<int>(rng() % 120);
        for (int j = 0; j < len; ++j) raw.push_back(static_cast<char>(rng() & 0xff));
        const AnalysisVerdict v = parse_verdict(raw, Role::analyst);
        CHECK(v.requires_permission == !v.permissions.empty());
    }
}

TEST_CASE("merge_verdicts unions roles and annotations") {
    AnalysisVerdict detector;
    detector.role = Role::detector;
    AnalysisVerdict analyst;
    analyst.role = Role::analyst;

    SUBCASE("declared plus analyst agreement") {
        analyst.permissions = {"android.permission.CAMERA"};
        const MergedCandidate m =
            merge_verdicts(detector, analyst, {"android.permission.CAMERA"});
        CHECK(m.permissions == std::set<std::string>{"android.permission.CAMERA"});
        CHECK(m.provenance == std::set<std::string>{"annotation", "analyst"});
        CHECK(m.confidence == Confidence::predicted);
    }
    SUBCASE("all empty means permission-free") {
        const MergedCandidate m = merge_verdicts(detector, analyst, {});
        CHECK(m.permissions.empty());
        CHECK(m.confidence == Confidence::declared);
    }
    SUBCASE("role disagreement widens the candidate") {
        detector.permissions = {"android.permission.INTERNET"};
        analyst.permissions = {"android.permission.ACCESS_NETWORK_STATE"};
        const MergedCandidate m = merge_verdicts(detector, analyst, {});
        CHECK(m.permissions == std::set<std::string>{"android.permission.ACCESS_NETWORK_STATE",
                                                     "android.permission.INTERNET"});
        CHECK(m.provenance == std::set<std::string>{"analyst", "detector"});
    }
    SUBCASE("annotations only stay declared") {
        const MergedCandidate m = merge_verdicts(detector, analyst, {"android.permission.NFC"});
        CHECK(m.confidence == Confidence::declared);
        CHECK(m.provenance == std::set<std::string>{"annotation"});
    }
}

TEST_CASE("merge is monotone and commutative over roles") {
    std::mt19937 rng(777);
    const std::vector<std::string> pool = {
        "android.permission.CAMERA", "android.permission.INTERNET",
        "android.permission.RECORD_AUDIO", "com.vendor.permission.PAY"};
    auto random_set = [&] {
        std::set<std::string> s;
        for (const auto& p : pool) {
            if (rng() % 2) s.insert(p);
        }
        return s;
    };
    for (int i = 0; i < 200; ++i) {
        AnalysisVerdict detector;
        detector.role = Role::detector;
        detector.permissions = random_set();
        AnalysisVerdict analyst;
        analyst.role = Role::analyst;
        analyst.permissions = random_set();
        const std::set<std::string> declared = random_set();

        const MergedCandidate m = merge_verdicts(detector, analyst, declared);
        for (const auto& p : declared) CHECK(m.permissions.contains(p));

        AnalysisVerdict swapped_detector;
        swapped_detector.role = Role::detector;
        swapped_detector.permissions = analyst.permissions;
        AnalysisVerdict swapped_analyst;
        swapped_analyst.role = Role::analyst;
        swapped_analyst.permissions = detector.permissions;
        CHECK(merge_verdicts(swapped_detector, swapped_analyst, declared).permissions ==
              m.permissions);
    }
}

TEST_CASE("glob_match implements anchored shell globs") {
    CHECK(glob_match("*", "anything"));
    CHECK(glob_match("*.request*", "android.net.Wifi.requestScan"));
    CHECK_FALSE(glob_match("*.request*", "android.net.Wifi.sendText"));
    CHECK(glob_match("a?c", "abc"));
    CHECK_FALSE(glob_match("a?c", "abcd"));
    CHECK(glob_match("exact", "exact"));
    CHECK_FALSE(glob_match("exact", "exactly"));
}

TEST_CASE("mock provider answers per role from the oracle file") {
    MappingStore store = fixture_store();
    MockProvider mock(kFixtures / "mock_oracle.json");
    const ApiRecord gps = fixture_record(store, "isGPSEnabled");
    const ProviderConfig pc = test_provider_config();

    const AnalyzeOutcome outcome = analyze_record(gps, mock, default_demonstrations(), pc);
    REQUIRE_FALSE(outcome.failed);
    CHECK(outcome.detector.permissions.empty());
    CHECK(outcome.analyst.permissions ==
          std::set<std::string>{"android.permission.ACCESS_FINE_LOCATION"});
    CHECK(mock.call_count() == 2);
}

TEST_CASE("mock provider defaults to permission-free for unlisted records") {
    MappingStore store = fixture_store();
    MockProvider mock(kFixtures / "mock_oracle.json");
    const ApiRecord misc = fixture_record(store, "padLeft");
    const AnalyzeOutcome outcome =
        analyze_record(misc, mock, default_demonstrations(), test_provider_config());
    REQUIRE_FALSE(outcome.failed);
    CHECK_FALSE(outcome.detector.requires_permission);
    CHECK_FALSE(outcome.analyst.requires_permission);
}

TEST_CASE("mock provider wildcard patterns flag every matching record") {
    MappingStore store = fixture_store();

    const fs::path oracle_file = fs::temp_directory_path() / "permap_wildcard_oracle.json";
    {
        std::ofstream out(oracle_file);
        out << R"({"detector": {"*.request*": ["android.permission.CHANGE_WIFI_STATE"]}})";
    }
    MockProvider mock(oracle_file);

    // Independent count of the APIs the glob should hit.
    std::size_t expected = 0;
    for (const auto& r : store.records()) {
        std::string dotted = r.signature.fq_class + "." + r.signature.name;
        if (glob_match("*.request*", dotted)) ++expected;
    }
    CHECK(expected == 2);  // requestNetworkScan + requestSignalStrength

    std::size_t flagged = 0;
    for (const auto& r : store.records()) {
        const AnalyzeOutcome outcome =
            analyze_record(r, mock, default_demonstrations(), test_provider_config());
        if (outcome.detector.requires_permission) ++flagged;
    }
    CHECK(flagged == expected);
}

TEST_CASE("mock provider startup fails without its oracle file") {
    CHECK_THROWS_AS(MockProvider(kFixtures / "no_such_oracle.json"), PermapError);
}

TEST_CASE("mock oracle accepts api_id keys once resolved against a store") {
    MappingStore store = fixture_store();
    const ApiRecord gps = fixture_record(store, "isGPSEnabled");

    const fs::path oracle_file = fs::temp_directory_path() / "permap_apiid_oracle.json";
    {
        std::ofstream out(oracle_file);
        out << R"({"analyst": {")" << gps.api_id
            << R"(": ["android.permission.ACCESS_FINE_LOCATION"]}})";
    }
    MockProvider mock(oracle_file);
    mock.resolve_api_ids(store);
    const AnalyzeOutcome outcome =
        analyze_record(gps, mock, default_demonstrations(), test_provider_config());
    CHECK(outcome.analyst.permissions ==
          std::set<std::string>{"android.permission.ACCESS_FINE_LOCATION"});
}

TEST_CASE("over-long bodies are shed, demonstrations never are") {
    MappingStore store = fixture_store();
    ApiRecord record = fixture_record(store, "padLeft");
    record.body_text = std::string(50000, 'x');

    class CapturingProvider : public Provider {
    public:
        std::string complete(const std::string& prompt) override {
            log_call(prompt);
            return R"({"requires_permission":false,"permissions":[]})";
        }
    };
    CapturingProvider provider;
    ProviderConfig pc = test_provider_config();
    pc.prompt_char_limit = 4000;
    pc.body_char_budget = 8000;  // still too big, forces halving

    const AnalyzeOutcome outcome = analyze_record(record, provider, default_demonstrations(), pc);
    CHECK_FALSE(outcome.failed);
    REQUIRE(provider.call_count() == 2);
    for (const auto& prompt : provider.call_log()) {
        CHECK(prompt.size() <= 4000);
        // All four demonstrations survive truncation.
        CHECK(prompt.find("Demonstration 4") != std::string::npos);
    }
}

TEST_CASE("transient transport failures are retried") {
    MappingStore store = fixture_store();
    const ApiRecord record = fixture_record(store, "padLeft");
    ProviderConfig pc = test_provider_config();
    pc.retries = 2;

    FlakyProvider flaky(1, R"({"requires_permission":false,"permissions":[]})");
    const AnalyzeOutcome outcome = analyze_record(record, flaky, default_demonstrations(), pc);
    CHECK_FALSE(outcome.failed);

    FlakyProvider dead(100, "{}");
    const AnalyzeOutcome failed = analyze_record(record, dead, default_demonstrations(), pc);
    CHECK(failed.failed);
}

TEST_CASE("analyze_store makes two calls per record and is idempotent") {
    MappingStore store = fixture_store();
    for (const auto& r : store.records()) {
        store.upsert_mapping(r.api_id, r.declared_permissions, "annotation", Confidence::declared);
    }
    MockProvider mock(kFixtures / "mock_oracle.json");
    const ProviderConfig pc = test_provider_config();

    const AnalyzeStats stats = analyze_store(store, mock, default_demonstrations(), pc);
    CHECK(stats.analyzed == 40);
    CHECK(stats.permission_required == 7);
    CHECK(stats.failed_api_ids.empty());
    CHECK(mock.call_count() == 2 * 40);

    MappingStore again = store;
    analyze_store(again, mock, default_demonstrations(), pc);
    CHECK(again == store);
}

TEST_CASE("analyze pass is deterministic across runs and worker counts") {
    auto run = [&](int workers) {
        MappingStore store = fixture_store();
        for (const auto& r : store.records()) {
            store.upsert_mapping(r.api_id, r.declared_permissions, "annotation",
                                 Confidence::declared);
        }
        MockProvider mock(kFixtures / "mock_oracle.json");
        ProviderConfig pc = test_provider_config();
        pc.max_in_flight = workers;
        analyze_store(store, mock, default_demonstrations(), pc);
        return store;
    };
    const MappingStore one = run(1);
    const MappingStore four = run(4);
    CHECK(one == four);
}

TEST_CASE("http provider posts the prompt with a bearer credential") {
    httplib::Server server;
    std::string seen_auth;
    std::string seen_model;
    server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        auto body = nlohmann::json::parse(req.body);
        seen_model = body["model"];
        res.set_content(R"({"output":"{\"requires_permission\":false,\"permissions\":[]}"})",
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("PERMAP_TEST_KEY", "sekrit", 1);
    ProviderConfig pc;
    pc.provider_name = "http";
    pc.model_id = "test-model";
    pc.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
    pc.credential_env = "PERMAP_TEST_KEY";
    HttpProvider provider(pc);

    const std::string response = provider.complete("prompt text");
    CHECK(response == R"({"requires_permission":false,"permissions":[]})");
    CHECK(seen_auth == "Bearer sekrit");
    CHECK(seen_model == "test-model");

    server.stop();
    server_thread.join();
}

TEST_CASE("http provider reports transport failures as provider errors") {
    ProviderConfig pc;
    pc.provider_name = "http";
    pc.endpoint = "http://127.0.0.1:9/unreachable";  // discard port
    pc.timeout_seconds = 1;
    HttpProvider provider(pc);
    CHECK_THROWS_AS(provider.complete("x"), PermapError);

    CHECK_THROWS_AS(HttpProvider([] {
                        ProviderConfig bad;
                        bad.endpoint = "https://needs-tls.example";
                        return bad;
                    }()),
                    PermapError);
}

#include "core/simulator.hpp"

#include "core/canonical.hpp"
#include "core/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>

namespace permap {

namespace fs = std::filesystem;
using nlohmann::json;

PermissionOracle load_permission_oracle(const fs::path& file, const MappingStore& store,
                                        std::vector<std::string>* warnings) {
    std::ifstream in(file);
    if (!in) {
        throw PermapError(ErrorCode::oracle_error, "cannot open permission oracle: " + file.string());
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw PermapError(ErrorCode::oracle_error, "malformed permission oracle: " + file.string());
    }

    std::map<std::string, std::string> key_to_api_id;
    for (const auto& r : store.records()) {
        key_to_api_id[r.signature.key()] = r.api_id;
    }

    PermissionOracle oracle;
    for (const auto& [key, perms] : j.items()) {
        if (!perms.is_array()) {
            throw PermapError(ErrorCode::oracle_error, "oracle entry '" + key + "' must be an array");
        }
        std::set<std::string> required;
        for (const auto& p : perms) {
            required.insert(canonicalize_permission(p.get<std::string>()));
        }
        std::string api_id;
        if (store.find_record(key)) {
            api_id = key;
        } else if (auto it = key_to_api_id.find(key); it != key_to_api_id.end()) {
            api_id = it->second;
        } else {
            if (warnings) warnings->push_back("oracle key does not match any record: " + key);
            continue;
        }
        oracle.entries[api_id].insert(required.begin(), required.end());
    }
    return oracle;
}

ExecutionOutcome execute_simulated(const TestCase& tc, const PermissionOracle& oracle,
                                   const MappingStore& store) {
    ExecutionOutcome out;
    out.case_id = tc.case_id;
    if (tc.status != CaseStatus::validated) {
        out.result = ExecResult::harness_error;
        return out;
    }
    const auto it = oracle.entries.find(tc.api_id);
    if (it == oracle.entries.end()) {
        out.result = ExecResult::completed;
        return out;
    }
    std::set<std::string> missing;
    for (const auto& p : it->second) {
        if (!tc.manifest_permissions.contains(p)) missing.insert(p);
    }
    if (missing.empty()) {
        out.result = ExecResult::completed;
        return out;
    }
    const ApiRecord* record = store.find_record(tc.api_id);
    const std::string fq_method =
        record ? record->signature.fq_class + "." + record->signature.name : tc.api_id;
    std::string message = "SecurityException: " + fq_method + " requires ";
    bool first = true;
    for (const auto& p : missing) {
        if (!first) message += ", ";
        message += p;
        first = false;
    }
    out.result = ExecResult::security_exception;
    out.exception_message = std::move(message);
    out.extracted_permissions = parse_security_exception(out.exception_message);
    return out;
}

std::set<std::string> parse_security_exception(const std::string& message) {
    return scan_permission_tokens(message);
}

VerifyResult verify_mapping(PermissionMapping& mapping, const TestCase& tc,
                            const PermissionOracle& oracle, const MappingStore& store) {
    VerifyResult result;
    if (tc.status != CaseStatus::validated) {
        mapping.verify_flag = "unverifiable";
        result.flag = mapping.verify_flag;
        return result;
    }
    const ExecutionOutcome outcome = execute_simulated(tc, oracle, store);
    const std::set<std::string>& evidence = outcome.extracted_permissions;
    if (evidence.empty()) {
        mapping.verify_flag = "no_evidence";
        result.flag = mapping.verify_flag;
        return result;
    }
    mapping.permissions.insert(evidence.begin(), evidence.end());
    mapping.provenance.insert("verified");
    mapping.confidence = Confidence::verified;
    mapping.verify_flag.clear();
    result.verified = true;
    return result;
}

VerifyStats verify_store(MappingStore& store, const std::vector<SnippetCorpusEntry>& snippets,
                         TestCaseGenerator& generator, TestCaseRefiner& refiner,
                         const PermissionOracle& oracle, int max_iterations,
                         double similarity_threshold, std::size_t sample_limit,
                         const std::vector<std::string>& banned_tokens) {
    VerifyStats stats;
    std::vector<std::string> candidate_ids;
    for (const auto& [api_id, mapping] : store.mappings()) candidate_ids.push_back(api_id);
    if (sample_limit > 0 && candidate_ids.size() > sample_limit) {
        candidate_ids.resize(sample_limit);
    }
    stats.candidates = candidate_ids.size();

    for (const std::string& api_id : candidate_ids) {
        const ApiRecord* record = store.find_record(api_id);
        PermissionMapping* mapping = store.find_mapping_mut(api_id);
        if (!record || !mapping) continue;

        const SnippetCorpusEntry* retrieved =
            retrieve_snippet(*record, snippets, similarity_threshold);
        TestCase tc = generate_test_case(*record, generator, retrieved);
        if (!tc.harness_blocked) {
            tc = refine_loop(std::move(tc), store, refiner, max_iterations, banned_tokens);
        }
        if (tc.status == CaseStatus::rejected) {
            stats.rejected_api_ids.push_back(api_id);
        }
        const VerifyResult result = verify_mapping(*mapping, tc, oracle, store);
        if (result.verified) {
            ++stats.verified;
        } else {
            stats.unverified_api_ids.push_back(api_id);
        }
    }
    return stats;
}

std::vector<DeviceBundle> export_device_bundles(const MappingStore& store,
                                                const std::vector<SnippetCorpusEntry>& snippets,
                                                TestCaseGenerator& generator,
                                                TestCaseRefiner& refiner, int max_iterations,
                                                double similarity_threshold,
                                                const fs::path& out_dir) {
    std::vector<DeviceBundle> bundles;
    fs::create_directories(out_dir);
    for (const auto& [api_id, mapping] : store.mappings()) {
        const ApiRecord* record = store.find_record(api_id);
        if (!record) continue;
        const SnippetCorpusEntry* retrieved =
            retrieve_snippet(*record, snippets, similarity_threshold);
        TestCase tc = generate_test_case(*record, generator, retrieved);
        if (tc.harness_blocked) continue;
        tc = refine_loop(std::move(tc), store, refiner, max_iterations);
        if (tc.status != CaseStatus::validated) continue;

        const fs::path dir = out_dir / tc.case_id;
        fs::create_directories(dir);
        {
            std::ofstream src(dir / (case_class_name(*record) + ".java"), std::ios::binary);
            src << tc.code;
        }
        json manifest;
        manifest["case_id"] = tc.case_id;
        manifest["api_id"] = api_id;
        manifest["signature"] = record->signature.key();
        manifest["target_sdk_version"] = tc.sdk_version;
        manifest["grant"] = std::vector<std::string>(tc.manifest_permissions.begin(),
                                                     tc.manifest_permissions.end());
        manifest["expected_exception_substring"] =
            "SecurityException: " + record->signature.fq_class + "." + record->signature.name +
            " requires";
        manifest["expected_permissions"] =
            std::vector<std::string>(mapping.permissions.begin(), mapping.permissions.end());
        {
            std::ofstream mf(dir / "run_manifest.json", std::ios::binary);
            mf << manifest.dump(2) << "\n";
        }
        bundles.push_back({tc.case_id, dir});
    }
    return bundles;
}

} // namespace permap

#include "core/pipeline.hpp"

#include "core/doc_audit.hpp"
#include "core/errors.hpp"
#include "core/evolution.hpp"
#include "core/prompts.hpp"
#include "core/provider.hpp"
#include "core/simulator.hpp"
#include "core/snippets.hpp"
#include "core/testcase.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

namespace permap {

namespace fs = std::filesystem;

namespace {

std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

void write_text_file(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw PermapError(ErrorCode::io_error, "cannot write " + file.string());
    }
    out << text;
}

fs::path require_path(const PipelineConfig& config, const std::string& key,
                      const std::string& what) {
    const fs::path p = config.get_path(key);
    if (p.empty()) {
        throw PermapError(ErrorCode::config_error, "config is missing " + key + " (" + what + ")");
    }
    if (!fs::exists(p)) {
        throw PermapError(ErrorCode::config_error, what + " does not exist: " + p.string());
    }
    return p;
}

fs::path out_base(const PipelineConfig& config, const fs::path& out_override) {
    if (!out_override.empty()) return out_override;
    const fs::path from_config = config.get_path("out_dir");
    return from_config.empty() ? fs::path("out") : from_config;
}

std::vector<Demonstration> demos_for(const PipelineConfig& config) {
    const fs::path path = config.get_path("demonstrations");
    return path.empty() ? default_demonstrations() : load_demonstrations(path);
}

std::vector<SnippetCorpusEntry> snippets_for(const PipelineConfig& config) {
    const fs::path path = config.get_path("snippet_corpus");
    if (path.empty()) return {};
    return load_snippet_corpus(path);
}

} // namespace

fs::path make_run_dir(const fs::path& base, const std::string& corpus_id) {
    fs::create_directories(base);
    const std::string stem = corpus_id + "-" + utc_stamp();
    fs::path dir = base / stem;
    for (int suffix = 2; fs::exists(dir); ++suffix) {
        dir = base / (stem + "-" + std::to_string(suffix));
    }
    fs::create_directories(dir);
    write_text_file(base / "latest", dir.filename().string() + "\n");
    return dir;
}

ExtractRunResult run_extract(const PipelineConfig& config, const fs::path& out_override) {
    const fs::path manifest = require_path(config, "corpus_manifest", "corpus manifest");
    SourceCorpus corpus = load_corpus_manifest(manifest);
    corpus.trigger_keywords = config.trigger_keywords();

    ScanOutput scan = scan_corpus(corpus);

    MappingStore store(corpus.corpus_id, corpus.sdk_version);
    for (ApiRecord& r : scan.records) {
        store.add_record(std::move(r));
    }
    for (const ApiRecord& r : store.records()) {
        store.upsert_mapping(r.api_id, r.declared_permissions, "annotation", Confidence::declared);
    }

    ExtractRunResult result;
    result.covered = store.covered_count();
    for (const auto& r : store.records()) {
        if (r.extraction_source == ExtractionSource::keyword) ++result.keyword_extracted;
    }
    result.warnings = std::move(scan.warnings);

    const fs::path run_dir = make_run_dir(out_base(config, out_override), corpus.corpus_id);
    result.store_path = run_dir / (corpus.corpus_id + ".pmdb.jsonl");
    save_store(store, result.store_path);
    return result;
}

AnalyzeRunResult run_analyze(const PipelineConfig& config, const fs::path& store_path,
                             const fs::path& mock_oracle_override) {
    MappingStore store = load_store(store_path);
    const ProviderConfig pc = config.provider();
    const fs::path mock_oracle =
        mock_oracle_override.empty() ? config.get_path("mock_oracle") : mock_oracle_override;

    std::unique_ptr<Provider> provider = make_provider(pc, mock_oracle);
    if (auto* mock = dynamic_cast<MockProvider*>(provider.get())) {
        mock->resolve_api_ids(store);
    }

    const std::vector<Demonstration> demos = demos_for(config);
    const AnalyzeStats stats = analyze_store(store, *provider, demos, pc);
    if (!store.records().empty() && stats.failed_api_ids.size() == store.records().size()) {
        throw PermapError(ErrorCode::provider_error,
                          "provider unreachable: every record failed analysis");
    }
    save_store(store, store_path);

    AnalyzeRunResult result;
    result.permission_required = stats.permission_required;
    result.failed_api_ids = stats.failed_api_ids;
    return result;
}

VerifyRunResult run_verify(const PipelineConfig& config, const fs::path& store_path,
                           const fs::path& mock_oracle_override) {
    MappingStore store = load_store(store_path);
    const fs::path oracle_path = require_path(config, "exec_oracle", "permission oracle");
    std::vector<std::string> oracle_warnings;
    const PermissionOracle oracle = load_permission_oracle(oracle_path, store, &oracle_warnings);

    const std::vector<SnippetCorpusEntry> snippets = snippets_for(config);
    const ProviderConfig pc = config.provider();
    const fs::path mock_oracle =
        mock_oracle_override.empty() ? config.get_path("mock_oracle") : mock_oracle_override;
    const bool mock_mode = !mock_oracle.empty() || pc.provider_name == "mock";

    TemplateGenerator template_generator;
    TemplateRefiner template_refiner;
    std::unique_ptr<Provider> provider;
    std::unique_ptr<ProviderGenerator> provider_generator;
    std::unique_ptr<ProviderRefiner> provider_refiner;
    TestCaseGenerator* generator = &template_generator;
    TestCaseRefiner* refiner = &template_refiner;
    if (!mock_mode) {
        provider = make_provider(pc, {});
        provider_generator = std::make_unique<ProviderGenerator>(*provider, pc.retries);
        provider_refiner = std::make_unique<ProviderRefiner>(*provider, pc.retries);
        generator = provider_generator.get();
        refiner = provider_refiner.get();
    }

    const VerifyStats stats =
        verify_store(store, snippets, *generator, *refiner, oracle,
                     config.max_iterations(), config.similarity_threshold(),
                     config.verify_sample(), config.banned_tokens());
    save_store(store, store_path);

    VerifyRunResult result;
    result.candidates = stats.candidates;
    result.verified = stats.verified;
    result.rejected_api_ids = stats.rejected_api_ids;
    result.unverified_api_ids = stats.unverified_api_ids;
    return result;
}

ReportRunResult run_report(const PipelineConfig& config, const std::vector<fs::path>& store_paths,
                           const fs::path& out_override) {
    if (store_paths.empty()) {
        throw PermapError(ErrorCode::config_error, "report needs at least one store file");
    }
    std::vector<MappingStore> stores;
    stores.reserve(store_paths.size());
    for (const auto& p : store_paths) stores.push_back(load_store(p));

    ReportRunResult result;
    result.report_dir = make_run_dir(out_base(config, out_override), stores.front().corpus_id());

    auto emit = [&](const std::string& name, const nlohmann::json& j, const std::string& text) {
        const fs::path json_path = result.report_dir / (name + ".json");
        const fs::path text_path = result.report_dir / (name + ".txt");
        write_text_file(json_path, j.dump(2) + "\n");
        write_text_file(text_path, text);
        result.files.push_back(json_path);
        result.files.push_back(text_path);
    };

    std::vector<DocRecord> docs;
    bool have_docs = false;
    if (const fs::path doc_dump = config.get_path("doc_dump"); !doc_dump.empty()) {
        IngestResult ingest = ingest_doc_dump(doc_dump);
        docs = std::move(ingest.records);
        for (auto& w : ingest.warnings) result.notices.push_back("doc page skipped: " + w);
        have_docs = true;
    } else {
        result.notices.push_back("doc gap skipped: no doc_dump configured");
    }

    std::set<std::string> baseline;
    bool have_baseline = false;
    if (const fs::path baseline_path = config.get_path("baseline"); !baseline_path.empty()) {
        baseline = load_baseline_keys(baseline_path);
        have_baseline = true;
    } else {
        result.notices.push_back("overlap skipped: no baseline configured");
    }

    for (const MappingStore& store : stores) {
        const std::string& id = store.corpus_id();
        const GapReport ann = annotation_gap(store);
        emit(id + ".anngap", to_json(ann), render_text(ann, "annotation gap"));

        const PackageDistribution dist = distribution(store);
        emit(id + ".dist", to_json(dist), render_text(dist, "package distribution"));

        if (have_docs) {
            const GapReport doc = doc_gap(store, docs);
            emit(id + ".docgap", to_json(doc), render_text(doc, "documentation gap"));
        }
        if (have_baseline) {
            const bool jni_only = config.get_bool("baseline_jni_only", false);
            const OverlapReport overlap = overlap_report(store, baseline, jni_only);
            emit(id + ".overlap", to_json(overlap), render_text(overlap, "baseline overlap"));
        }
    }

    for (std::size_t i = 0; i + 1 < stores.size(); ++i) {
        const MappingStore& a = stores[i];
        const MappingStore& b = stores[i + 1];
        if (a.sdk_version() >= b.sdk_version()) {
            result.notices.push_back("warning: diff inputs " + a.corpus_id() + " and " +
                                     b.corpus_id() +
                                     " are not in ascending sdk_version order; proceeding keyed on "
                                     "signatures");
        }
        const VersionDiff diff = diff_versions(a, b);
        emit(a.corpus_id() + "_vs_" + b.corpus_id() + ".diff", to_json(diff),
             render_text(diff, "version diff " + a.corpus_id() + " -> " + b.corpus_id()));
    }
    return result;
}

ExportRunResult run_export(const PipelineConfig& config, const fs::path& store_path,
                           const fs::path& out_override) {
    MappingStore store = load_store(store_path);
    const std::vector<SnippetCorpusEntry> snippets = snippets_for(config);

    TemplateGenerator generator;
    TemplateRefiner refiner;
    const fs::path base = out_base(config, out_override);
    const fs::path dir = make_run_dir(base, store.corpus_id() + "-bundles");
    const std::vector<DeviceBundle> bundles =
        export_device_bundles(store, snippets, generator, refiner, config.max_iterations(),
                              config.similarity_threshold(), dir);

    ExportRunResult result;
    result.bundle_dir = dir;
    result.bundle_count = bundles.size();
    return result;
}

} // namespace permap

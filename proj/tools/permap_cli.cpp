// permap command-line front end. Talks to the pipeline exclusively through
// the public C API.

#include <permap/permap.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ConfigCloser {
    void operator()(permap_config* c) const { permap_config_close(c); }
};
using ConfigHandle = std::unique_ptr<permap_config, ConfigCloser>;

struct StringFree {
    void operator()(char* s) const { permap_free(s); }
};
using OwnedString = std::unique_ptr<char, StringFree>;

int fail_from_last_error() {
    std::fprintf(stderr, "error: %s\n", permap_last_error_message());
    return 1;
}

ConfigHandle open_config(const std::string& config_path,
                         const std::vector<std::string>& overrides, bool& ok) {
    ok = false;
    ConfigHandle config(config_path.empty() ? permap_config_new()
                                            : permap_config_open(config_path.c_str()));
    if (!config) return config;
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            return config;
        }
        if (permap_config_set(config.get(), kv.substr(0, eq).c_str(),
                              kv.substr(eq + 1).c_str()) != PERMAP_OK) {
            fail_from_last_error();
            return config;
        }
    }
    ok = true;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"permap: extract SDK APIs, predict and verify their permissions, report gaps"};
    app.set_version_flag("--version", permap_version());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string mock_oracle;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "pipeline config file (TOML-style)");
    app.add_option("--out", out_dir, "output base directory (overrides config out_dir)");
    app.add_option("--mock-oracle", mock_oracle, "mock LLM oracle file; forces the mock provider");
    app.add_option("--set", overrides, "override a config key, e.g. --set max_iterations=5")
        ->take_all();

    auto* cmd_extract = app.add_subcommand("extract", "scan the corpus into a new store");

    std::string analyze_store_path;
    auto* cmd_analyze = app.add_subcommand("analyze", "dual-role permission analysis over a store");
    cmd_analyze->add_option("store", analyze_store_path, "store file (.pmdb.jsonl)")->required();

    std::string verify_store_path;
    auto* cmd_verify =
        app.add_subcommand("verify", "generate, validate and execute test cases for candidates");
    cmd_verify->add_option("store", verify_store_path, "store file (.pmdb.jsonl)")->required();

    std::vector<std::string> report_store_paths;
    auto* cmd_report = app.add_subcommand("report", "emit gap, distribution, overlap and diff reports");
    cmd_report->add_option("stores", report_store_paths, "store files, in version order")
        ->required()
        ->expected(-1);

    std::string export_store_path;
    auto* cmd_export =
        app.add_subcommand("export-device-bundle", "emit client-app bundles for validated cases");
    cmd_export->add_option("store", export_store_path, "store file (.pmdb.jsonl)")->required();

    CLI11_PARSE(app, argc, argv);

    bool ok = false;
    ConfigHandle config = open_config(config_path, overrides, ok);
    if (!config) return fail_from_last_error();
    if (!ok) return 1;

    const char* out = out_dir.empty() ? nullptr : out_dir.c_str();
    const char* oracle = mock_oracle.empty() ? nullptr : mock_oracle.c_str();

    if (cmd_extract->parsed()) {
        OwnedString store_path;
        char* raw = nullptr;
        long covered = 0;
        long keyword = 0;
        if (permap_run_extract(config.get(), out, &raw, &covered, &keyword) != PERMAP_OK) {
            return fail_from_last_error();
        }
        store_path.reset(raw);
        std::printf("covered=%ld keyword_extracted=%ld\n", covered, keyword);
        std::printf("store=%s\n", store_path.get());
        return 0;
    }
    if (cmd_analyze->parsed()) {
        long required = 0;
        if (permap_run_analyze(config.get(), analyze_store_path.c_str(), oracle, &required) !=
            PERMAP_OK) {
            return fail_from_last_error();
        }
        std::printf("permission_required=%ld\n", required);
        return 0;
    }
    if (cmd_verify->parsed()) {
        long verified = 0;
        char* raw = nullptr;
        if (permap_run_verify(config.get(), verify_store_path.c_str(), oracle, &verified, &raw) !=
            PERMAP_OK) {
            return fail_from_last_error();
        }
        OwnedString rejects(raw);
        std::printf("verified=%ld\n", verified);
        std::printf("rejected=%s\n", rejects.get());
        return 0;
    }
    if (cmd_report->parsed()) {
        std::vector<const char*> paths;
        paths.reserve(report_store_paths.size());
        for (const auto& p : report_store_paths) paths.push_back(p.c_str());
        char* raw = nullptr;
        if (permap_run_report(config.get(), paths.data(), static_cast<int>(paths.size()), out,
                              &raw) != PERMAP_OK) {
            return fail_from_last_error();
        }
        OwnedString report_dir(raw);
        std::printf("reports=%s\n", report_dir.get());
        return 0;
    }
    if (cmd_export->parsed()) {
        char* raw = nullptr;
        long count = 0;
        if (permap_run_export(config.get(), export_store_path.c_str(), out, &raw, &count) !=
            PERMAP_OK) {
            return fail_from_last_error();
        }
        OwnedString bundle_dir(raw);
        std::printf("bundles=%ld dir=%s\n", count, bundle_dir.get());
        return 0;
    }
    return 1;
}

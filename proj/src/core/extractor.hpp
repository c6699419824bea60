#pragma once

#include "core/records.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace permap {

struct SourceCorpus {
    std::filesystem::path root_path;
    int sdk_version = 0;
    std::string corpus_id;
    std::string core_jni_path = "frameworks/base/core/java/";
    std::vector<std::string> trigger_keywords;  // empty -> defaults
};

// Reads `corpus.json` ({corpus_id, sdk_version, root, core_jni_path}); a
// relative root is resolved against the manifest's directory.
SourceCorpus load_corpus_manifest(const std::filesystem::path& manifest_file);

struct ScanWarning {
    std::string file;
    std::string message;
};

struct ScanOutput {
    std::vector<ApiRecord> records;  // sorted by (file path, line)
    std::vector<ScanWarning> warnings;
};

// Walks the corpus, parsing each `.java` file and falling back to keyword
// scanning for files that fail to parse (and for stray declaration lines the
// parser did not cover). One record per distinct (fq_class, name,
// param_types); the parser wins ties. Unreadable files are skipped with a
// warning, an unreadable root is a corpus error.
ScanOutput scan_corpus(const SourceCorpus& corpus);

// Union of permissions named by `@RequiresPermission(...)` annotations
// (annotation name matched case-insensitively) and
// `{@link android.Manifest.permission#X}` doc references, canonicalized.
// Unparseable annotation arguments contribute nothing but add a warning.
std::set<std::string> extract_declared_permissions(const std::string& doc_comment,
                                                   const std::string& annotations_text,
                                                   std::vector<std::string>* warnings = nullptr);

// True iff the record is `native` and its file lies under the configured
// core sub-path.
bool detect_jni(const ApiRecord& record, const std::string& core_jni_path);

} // namespace permap

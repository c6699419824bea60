#include "core/extractor.hpp"

#include "core/canonical.hpp"
#include "core/errors.hpp"
#include "core/java_parser.hpp"
#include "core/keyword_scan.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace permap {

namespace fs = std::filesystem;
using nlohmann::json;

SourceCorpus load_corpus_manifest(const fs::path& manifest_file) {
    std::ifstream in(manifest_file);
    if (!in) {
        throw PermapError(ErrorCode::corpus_error,
                          "cannot open corpus manifest: " + manifest_file.string());
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw PermapError(ErrorCode::corpus_error,
                          "malformed corpus manifest: " + manifest_file.string());
    }
    SourceCorpus corpus;
    try {
        corpus.corpus_id = j.at("corpus_id").get<std::string>();
        corpus.sdk_version = j.at("sdk_version").get<int>();
        fs::path root = j.at("root").get<std::string>();
        if (root.is_relative()) root = manifest_file.parent_path() / root;
        corpus.root_path = root;
        if (j.contains("core_jni_path")) corpus.core_jni_path = j["core_jni_path"].get<std::string>();
    } catch (const json::exception& e) {
        throw PermapError(ErrorCode::corpus_error,
                          "corpus manifest missing field: " + std::string(e.what()));
    }
    if (corpus.sdk_version <= 0) {
        throw PermapError(ErrorCode::corpus_error, "corpus sdk_version must be positive");
    }
    return corpus;
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Pulls permission names out of one `@RequiresPermission(...)` argument list.
// Handles `Manifest.permission.X`, string literals, bare constants and the
// anyOf/allOf array forms.
void harvest_annotation_args(std::string_view args, std::set<std::string>& out,
                             std::vector<std::string>* warnings) {
    bool found_any = false;
    std::size_t i = 0;
    const std::size_t n = args.size();
    while (i < n) {
        const char c = args[i];
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < n && args[j] != '"') {
                if (args[j] == '\\') ++j;
                ++j;
            }
            if (j < n) {
                if (auto perm = try_canonicalize_permission(args.substr(i + 1, j - i - 1))) {
                    out.insert(std::move(*perm));
                    found_any = true;
                }
                i = j + 1;
                continue;
            }
            break;
        }
        if (ident_char(c)) {
            std::size_t j = i;
            while (j < n && (ident_char(args[j]) || args[j] == '.')) ++j;
            std::string_view token = args.substr(i, j - i);
            while (!token.empty() && token.back() == '.') token.remove_suffix(1);
            i = j;
            // Element names (anyOf, allOf, value, conditional) and literals
            // fail canonicalization and are skipped.
            if (token.find('.') != std::string_view::npos || token.find('_') != std::string_view::npos ||
                (token.size() > 1 && std::isupper(static_cast<unsigned char>(token.front())))) {
                if (auto perm = try_canonicalize_permission(token)) {
                    out.insert(std::move(*perm));
                    found_any = true;
                }
            }
            continue;
        }
        ++i;
    }
    if (!found_any && warnings) {
        warnings->push_back("unparseable @RequiresPermission arguments: " + std::string(args));
    }
}

void harvest_annotations(const std::string& text, std::set<std::string>& out,
                         std::vector<std::string>* warnings) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (text[i] != '@') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        std::string name;
        while (j < n && (ident_char(text[j]) || text[j] == '.')) {
            name.push_back(text[j]);
            ++j;
        }
        if (const auto dot = name.rfind('.'); dot != std::string::npos) name = name.substr(dot + 1);
        if (!iequals(name, "RequiresPermission")) {
            i = j;
            continue;
        }
        while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j >= n || text[j] != '(') {
            if (warnings) warnings->push_back("@RequiresPermission without arguments");
            i = j;
            continue;
        }
        int depth = 1;
        std::size_t k = j + 1;
        while (k < n && depth > 0) {
            if (text[k] == '(') ++depth;
            if (text[k] == ')') --depth;
            ++k;
        }
        harvest_annotation_args(text.substr(j + 1, k - j - 2), out, warnings);
        i = k;
    }
}

void harvest_doc_links(const std::string& doc, std::set<std::string>& out) {
    constexpr std::string_view kLink = "{@link";
    std::size_t i = 0;
    while ((i = doc.find(kLink, i)) != std::string::npos) {
        std::size_t j = i + kLink.size();
        while (j < doc.size() && std::isspace(static_cast<unsigned char>(doc[j]))) ++j;
        std::string_view rest = std::string_view(doc).substr(j);
        constexpr std::string_view kTargetA = "android.Manifest.permission#";
        constexpr std::string_view kTargetB = "Manifest.permission#";
        std::size_t skip = 0;
        if (rest.starts_with(kTargetA)) skip = kTargetA.size();
        else if (rest.starts_with(kTargetB)) skip = kTargetB.size();
        if (skip == 0) {
            i = j;
            continue;
        }
        std::size_t k = j + skip;
        std::string constant;
        while (k < doc.size() && ident_char(doc[k])) {
            constant.push_back(doc[k]);
            ++k;
        }
        if (auto perm = try_canonicalize_permission(constant)) out.insert(std::move(*perm));
        i = k;
    }
}

std::string top_package_of(const std::string& fq_class) {
    const auto dot = fq_class.find('.');
    return dot == std::string::npos ? fq_class : fq_class.substr(0, dot);
}

std::string normalize_rel_path(const fs::path& p) {
    std::string s = p.generic_string();
    if (s.starts_with("./")) s = s.substr(2);
    return s;
}

struct SigKey {
    std::string fq_class;
    std::string name;
    std::vector<std::string> param_types;
    auto operator<=>(const SigKey&) const = default;
};

SigKey key_of(const MethodSignature& s) {
    return SigKey{s.fq_class, s.name, s.param_types};
}

} // namespace

std::set<std::string> extract_declared_permissions(const std::string& doc_comment,
                                                   const std::string& annotations_text,
                                                   std::vector<std::string>* warnings) {
    std::set<std::string> out;
    harvest_annotations(annotations_text, out, warnings);
    harvest_doc_links(doc_comment, out);
    return out;
}

bool detect_jni(const ApiRecord& record, const std::string& core_jni_path) {
    if (!record.signature.modifiers.contains("native")) return false;
    std::string core = core_jni_path;
    if (!core.empty() && core.back() != '/') core += '/';
    return record.file_path.starts_with(core);
}

ScanOutput scan_corpus(const SourceCorpus& corpus) {
    ScanOutput out;
    std::error_code ec;
    if (!fs::is_directory(corpus.root_path, ec) || ec) {
        throw PermapError(ErrorCode::corpus_error,
                          "corpus root is not a readable directory: " + corpus.root_path.string());
    }
    const std::vector<std::string>& keywords =
        corpus.trigger_keywords.empty() ? default_trigger_keywords() : corpus.trigger_keywords;

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(corpus.root_path, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            throw PermapError(ErrorCode::corpus_error,
                              "error walking corpus root: " + ec.message());
        }
        if (it->is_regular_file() && it->path().extension() == ".java") {
            files.push_back(it->path());
        }
    }
    std::sort(files.begin(), files.end());

    std::map<SigKey, ApiRecord> by_signature;

    auto add_record = [&](ApiRecord record) {
        const SigKey key{record.signature.fq_class, record.signature.name,
                         record.signature.param_types};
        auto it = by_signature.find(key);
        if (it == by_signature.end()) {
            by_signature.emplace(key, std::move(record));
            return;
        }
        // Parser extraction always supersedes keyword extraction.
        if (it->second.extraction_source == ExtractionSource::keyword &&
            record.extraction_source == ExtractionSource::parser) {
            it->second = std::move(record);
        }
    };

    for (const fs::path& file : files) {
        const std::string rel = normalize_rel_path(fs::relative(file, corpus.root_path, ec));
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            out.warnings.push_back({rel, "unreadable file, skipped"});
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();

        ParseResult parsed = parse_file_methods(text);
        if (parsed.ok) {
            for (ParsedMethod& m : parsed.methods) {
                ApiRecord r;
                r.signature = std::move(m.signature);
                r.file_path = rel;
                r.line = m.line;
                r.top_package = top_package_of(r.signature.fq_class);
                r.api_level = corpus.sdk_version;
                r.deprecated = m.deprecated;
                r.doc_comment = std::move(m.doc_comment);
                r.body_text = std::move(m.body_text);
                std::string annotations_text;
                for (const auto& a : m.annotations) {
                    annotations_text += a;
                    annotations_text += '\n';
                }
                std::vector<std::string> perm_warnings;
                r.declared_permissions =
                    extract_declared_permissions(r.doc_comment, annotations_text, &perm_warnings);
                for (auto& w : perm_warnings) out.warnings.push_back({rel, std::move(w)});
                r.is_jni = detect_jni(r, corpus.core_jni_path);
                r.api_id = make_api_id(corpus.corpus_id, r.signature);
                r.extraction_source = ExtractionSource::parser;
                add_record(std::move(r));
            }
            // Stray declaration lines the parser did not cover.
            const FileOutline outline = scan_file_outline(text);
            for (KeywordMatch& km : keyword_scan(text, keywords)) {
                bool covered = false;
                for (const auto& [lo, hi] : parsed.method_line_spans) {
                    if (km.line >= lo && km.line <= hi) {
                        covered = true;
                        break;
                    }
                }
                if (covered) continue;
                ApiRecord r;
                r.signature = std::move(km.signature);
                if (!outline.primary_type.empty()) {
                    r.signature.fq_class = outline.package_name.empty()
                                               ? outline.primary_type
                                               : outline.package_name + "." + outline.primary_type;
                }
                r.file_path = rel;
                r.line = km.line;
                r.top_package = top_package_of(r.signature.fq_class);
                r.api_level = corpus.sdk_version;
                r.is_jni = detect_jni(r, corpus.core_jni_path);
                r.api_id = make_api_id(corpus.corpus_id, r.signature);
                r.extraction_source = ExtractionSource::keyword;
                add_record(std::move(r));
            }
            continue;
        }

        out.warnings.push_back(
            {rel, "parse failure at line " + std::to_string(parsed.error_line) + ": " + parsed.error +
                      "; falling back to keyword scan"});
        const FileOutline outline = scan_file_outline(text);
        for (KeywordMatch& km : keyword_scan(text, keywords)) {
            ApiRecord r;
            r.signature = std::move(km.signature);
            if (!outline.primary_type.empty()) {
                r.signature.fq_class = outline.package_name.empty()
                                           ? outline.primary_type
                                           : outline.package_name + "." + outline.primary_type;
            }
            r.file_path = rel;
            r.line = km.line;
            r.top_package = top_package_of(r.signature.fq_class);
            r.api_level = corpus.sdk_version;
            r.is_jni = detect_jni(r, corpus.core_jni_path);
            r.api_id = make_api_id(corpus.corpus_id, r.signature);
            r.extraction_source = ExtractionSource::keyword;
            add_record(std::move(r));
        }
    }

    for (auto& [key, record] : by_signature) {
        out.records.push_back(std::move(record));
    }
    std::sort(out.records.begin(), out.records.end(), [](const ApiRecord& a, const ApiRecord& b) {
        return std::tie(a.file_path, a.line) < std::tie(b.file_path, b.line);
    });
    return out;
}

} // namespace permap

#include "core/snippets.hpp"

#include "core/errors.hpp"
#include "core/keyword_scan.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>

namespace permap {

namespace fs = std::filesystem;
using nlohmann::json;

std::set<std::string> tokenize_identifiers(std::string_view text) {
    std::set<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
            ++j;
        }
        for (const std::string& seg : camel_segments(text.substr(i, j - i))) {
            std::string lower;
            lower.reserve(seg.size());
            for (char c : seg) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            tokens.insert(std::move(lower));
        }
        i = j;
    }
    return tokens;
}

std::set<std::string> signature_tokens(const MethodSignature& sig) {
    std::set<std::string> tokens = tokenize_identifiers(sig.fq_class);
    for (const auto& t : tokenize_identifiers(sig.name)) tokens.insert(t);
    for (const auto& p : sig.param_types) {
        for (const auto& t : tokenize_identifiers(p)) tokens.insert(t);
    }
    return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& x : a) {
        if (b.contains(x)) ++inter;
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<SnippetCorpusEntry> load_snippet_corpus(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec) || ec) {
        throw PermapError(ErrorCode::load_error, "snippet corpus is not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<SnippetCorpusEntry> corpus;
    for (const fs::path& file : files) {
        std::ifstream in(file);
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw PermapError(ErrorCode::load_error, "malformed snippet entry: " + file.string());
        }
        SnippetCorpusEntry e;
        try {
            e.snippet_id = j.at("snippet_id").get<std::string>();
            e.code = j.at("code").get<std::string>();
            if (j.contains("source_label")) e.source_label = j["source_label"].get<std::string>();
            if (j.contains("target_signature_tokens")) {
                for (const auto& t : j["target_signature_tokens"]) {
                    e.target_signature_tokens.insert(t.get<std::string>());
                }
            } else if (j.contains("target_signature")) {
                e.target_signature_tokens = tokenize_identifiers(j["target_signature"].get<std::string>());
            }
        } catch (const json::exception& ex) {
            throw PermapError(ErrorCode::load_error,
                              "bad snippet entry " + file.string() + ": " + ex.what());
        }
        if (e.target_signature_tokens.empty()) {
            throw PermapError(ErrorCode::load_error,
                              "snippet entry with empty token set: " + file.string());
        }
        corpus.push_back(std::move(e));
    }
    return corpus;
}

const SnippetCorpusEntry* retrieve_snippet(const ApiRecord& record,
                                           const std::vector<SnippetCorpusEntry>& corpus,
                                           double threshold) {
    const std::set<std::string> tokens = signature_tokens(record.signature);
    const SnippetCorpusEntry* best = nullptr;
    double best_score = -1.0;
    for (const auto& entry : corpus) {
        const double score = jaccard(tokens, entry.target_signature_tokens);
        if (score > best_score ||
            (score == best_score && best && entry.snippet_id < best->snippet_id)) {
            best = &entry;
            best_score = score;
        }
    }
    if (!best || best_score < threshold) return nullptr;
    return best;
}

} // namespace permap

#pragma once

#include "core/records.hpp"

#include <filesystem>
#include <vector>

namespace permap {

struct SnippetCorpusEntry {
    std::string snippet_id;
    std::set<std::string> target_signature_tokens;
    std::string code;
    std::string source_label;
};

// Directory of JSON files, one entry each: {snippet_id, code, source_label,
// target_signature | target_signature_tokens}. Entries with an empty token
// set are a load error.
std::vector<SnippetCorpusEntry> load_snippet_corpus(const std::filesystem::path& dir);

// Lowercased identifier tokens split on camelCase humps and punctuation.
std::set<std::string> tokenize_identifiers(std::string_view text);
std::set<std::string> signature_tokens(const MethodSignature& sig);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Entry with maximal Jaccard similarity to the record's signature tokens,
// if it reaches the threshold; ties break to the smallest snippet_id.
const SnippetCorpusEntry* retrieve_snippet(const ApiRecord& record,
                                           const std::vector<SnippetCorpusEntry>& corpus,
                                           double threshold = 0.6);

} // namespace permap

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace permap {

struct MethodSignature {
    std::string fq_class;                  // dotted, nested classes joined with '.'
    std::string name;
    std::vector<std::string> param_types;  // declaration order, generics erased
    std::string return_type;
    std::set<std::string> modifiers;

    bool operator==(const MethodSignature&) const = default;

    // `fq_class#name(type1,type2)` — the join key used by oracles, baselines
    // and cross-version diffs.
    std::string key() const;
    // `fq_class.name(type1,type2)` — the spelling used in prompts and
    // simulated exception messages.
    std::string dotted() const;
};

enum class ExtractionSource { parser, keyword };

struct ApiRecord {
    std::string api_id;
    MethodSignature signature;
    std::string file_path;     // relative to the corpus root
    int line = 0;
    std::string top_package;   // first dotted segment of fq_class
    int api_level = 0;
    bool deprecated = false;
    std::string doc_comment;
    std::string body_text;
    std::set<std::string> declared_permissions;
    bool is_jni = false;
    ExtractionSource extraction_source = ExtractionSource::parser;

    bool operator==(const ApiRecord&) const = default;
};

enum class Confidence { declared = 0, predicted = 1, verified = 2 };

struct PermissionMapping {
    std::string api_id;
    std::set<std::string> permissions;
    std::set<std::string> provenance;  // subset of {annotation, detector, analyst, doc, verified}
    Confidence confidence = Confidence::declared;
    int sdk_version = 0;
    std::string verify_flag;           // "", "unverifiable" or "no_evidence"

    bool operator==(const PermissionMapping&) const = default;
};

const char* to_string(Confidence c);
const char* to_string(ExtractionSource s);
Confidence confidence_from_string(const std::string& s);
ExtractionSource extraction_source_from_string(const std::string& s);

// Stable identifier over (corpus_id, fq_class, name, param_types).
std::string make_api_id(const std::string& corpus_id, const MethodSignature& sig);

} // namespace permap

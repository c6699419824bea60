#pragma once

#include "core/records.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace permap {

struct KeywordMatch {
    MethodSignature signature;  // fq_class is "_" at this layer
    int line = 0;
    std::optional<std::string> trigger_keyword;  // get/set/create/request/manage hit, if any
};

// Default trigger keywords, matched as case-sensitive prefixes of camelCase
// name segments.
const std::vector<std::string>& default_trigger_keywords();

// Line-oriented fallback extraction: matches declarations of the form
// `<modifiers> <return_type> <name>(<params>)` outside comments. Best-effort,
// never fails on any input.
std::vector<KeywordMatch> keyword_scan(std::string_view file_text,
                                       const std::vector<std::string>& trigger_keywords =
                                           default_trigger_keywords());

// Splits a camelCase identifier into segments (`isGPSEnabled` -> is, GPS,
// Enabled). Shared with snippet tokenization.
std::vector<std::string> camel_segments(std::string_view name);

// Best-effort `package X; ... class Y` recovery used to qualify keyword
// matches from files the parser rejected.
struct FileOutline {
    std::string package_name;
    std::string primary_type;  // first top-level class/interface/enum name
};
FileOutline scan_file_outline(std::string_view file_text);

} // namespace permap

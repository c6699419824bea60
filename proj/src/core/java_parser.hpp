#pragma once

#include "core/records.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace permap {

struct ParsedMethod {
    MethodSignature signature;   // fq_class = package + nested type path
    int line = 0;
    std::string body_text;       // brace-delimited body, empty for abstract methods
    std::string doc_comment;     // associated block comment, delimiters stripped
    std::vector<std::string> annotations;  // raw annotation source, e.g. `@RequiresPermission(...)`
    bool deprecated = false;
};

struct ParseResult {
    bool ok = false;
    std::string error;
    int error_line = 0;
    std::string package_name;
    std::vector<ParsedMethod> methods;                   // source order
    std::vector<std::pair<int, int>> method_line_spans;  // inclusive, for keyword fallback
};

// Structural parse of a Java-style compilation unit. Returns every method
// declaration found in class/interface/enum bodies together with its body
// text and the block comment ending within two lines above the declaration.
// Any construct the parser cannot account for fails the whole file, which
// signals the caller to fall back to keyword scanning.
ParseResult parse_file_methods(std::string_view file_text);

} // namespace permap

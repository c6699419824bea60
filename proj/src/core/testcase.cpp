#include "core/testcase.hpp"

#include "core/errors.hpp"
#include "core/provider.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace permap {

namespace {

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

const std::set<std::string> kJavaKeywords = {
    "public", "private", "protected", "static", "final",  "void",   "class",  "new",
    "return", "null",    "true",      "false",  "int",    "long",   "short",  "byte",
    "float",  "double",  "boolean",   "char",   "if",     "else",   "for",    "while",
    "try",    "catch",   "throw",     "throws", "import", "package",
};

const std::set<std::string> kHarnessIdents = {"String", "System", "Harness", "args", "main"};

// Comment bodies and literal contents blanked out, structure preserved.
std::string strip_for_analysis(const std::string& code) {
    std::string out;
    out.reserve(code.size());
    std::size_t i = 0;
    const std::size_t n = code.size();
    while (i < n) {
        const char c = code[i];
        if (c == '/' && i + 1 < n && code[i + 1] == '/') {
            while (i < n && code[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && code[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(code[i] == '*' && code[i + 1] == '/')) ++i;
            i = std::min(n, i + 2);
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            out.push_back(quote);
            ++i;
            while (i < n && code[i] != quote) {
                if (code[i] == '\\') ++i;
                if (i < n) ++i;
            }
            if (i < n) {
                out.push_back(quote);
                ++i;
            }
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

std::vector<std::pair<std::string, bool>> identifiers_with_call_flag(const std::string& stripped) {
    std::vector<std::pair<std::string, bool>> out;
    std::size_t i = 0;
    const std::size_t n = stripped.size();
    while (i < n) {
        if (!(std::isalpha(static_cast<unsigned char>(stripped[i])) || stripped[i] == '_' ||
              stripped[i] == '$')) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && ident_char(stripped[j])) ++j;
        std::size_t k = j;
        while (k < n && std::isspace(static_cast<unsigned char>(stripped[k]))) ++k;
        out.emplace_back(stripped.substr(i, j - i), k < n && stripped[k] == '(');
        i = j;
    }
    return out;
}

// Word-boundary match; '.' counts as a boundary so banned simple names are
// caught inside qualified chains.
bool contains_token(const std::string& stripped, const std::string& token) {
    std::size_t pos = 0;
    while ((pos = stripped.find(token, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !ident_char(stripped[pos - 1]);
        const std::size_t end = pos + token.size();
        const bool right_ok = end >= stripped.size() || !ident_char(stripped[end]);
        if (left_ok && right_ok) return true;
        pos = end;
    }
    return false;
}

std::size_t count_substring(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string render_template(const ApiRecord& record, const SnippetCorpusEntry* retrieved) {
    std::ostringstream out;
    if (retrieved) {
        out << "// normalized from snippet " << retrieved->snippet_id;
        if (!retrieved->source_label.empty()) out << " (" << retrieved->source_label << ")";
        out << "\n";
    }
    out << "public class " << case_class_name(record) << " {\n";
    out << "    public static void main(String[] args) {\n";
    out << "        " << record.signature.fq_class << "." << record.signature.name << "(";
    for (std::size_t i = 0; i < record.signature.param_types.size(); ++i) {
        if (i) out << ", ";
        out << default_literal(record.signature.param_types[i]);
    }
    out << ");\n";
    out << "    }\n";
    out << "}\n";
    return out.str();
}

std::string strip_code_fences(std::string text) {
    const auto open = text.find("```");
    if (open == std::string::npos) return text;
    auto begin = text.find('\n', open);
    if (begin == std::string::npos) return text;
    ++begin;
    const auto close = text.find("```", begin);
    if (close == std::string::npos) return text;
    return text.substr(begin, close - begin);
}

} // namespace

std::string default_literal(const std::string& param_type) {
    if (param_type == "int" || param_type == "long" || param_type == "short" ||
        param_type == "byte") {
        return "0";
    }
    if (param_type == "float" || param_type == "double") return "0.0";
    if (param_type == "boolean") return "false";
    if (param_type == "char") return "'a'";
    if (param_type == "String" || param_type == "java.lang.String") return "\"\"";
    return "null";
}

std::string case_class_name(const ApiRecord& record) {
    return "PermCase_" + record.api_id.substr(0, 8);
}

std::string TemplateGenerator::generate(const ApiRecord& record, const SnippetCorpusEntry* retrieved) {
    return render_template(record, retrieved);
}

std::string ProviderGenerator::generate(const ApiRecord& record, const SnippetCorpusEntry* retrieved) {
    std::string prompt =
        "Generate a self-contained Java test case that invokes the target method exactly once "
        "from a single public static void main entry point, using only the target API, standard "
        "literals and harness hooks.\nTarget method: " +
        record.signature.dotted() + "\n";
    if (retrieved) {
        prompt += "Normalize this retrieved test case into that shape:\n" + retrieved->code + "\n";
    }
    prompt += "Respond with only the Java source.\n";

    int attempt = 0;
    while (true) {
        try {
            return strip_code_fences(provider_.complete(prompt));
        } catch (const PermapError& e) {
            if (e.code() != ErrorCode::provider_error || attempt >= retries_) throw;
            ++attempt;
        }
    }
}

TestCase generate_test_case(const ApiRecord& record, TestCaseGenerator& generator,
                            const SnippetCorpusEntry* retrieved) {
    TestCase tc;
    tc.case_id = "tc-" + record.api_id.substr(0, 12);
    tc.api_id = record.api_id;
    tc.sdk_version = record.api_level;
    if (retrieved) tc.source_snippet_id = retrieved->snippet_id;
    try {
        tc.code = generator.generate(record, retrieved);
    } catch (const PermapError&) {
        tc.harness_blocked = true;
    }
    return tc;
}

const std::vector<std::string>& default_banned_tokens() {
    static const std::vector<std::string> banned = {
        "java.io.File", "FileOutputStream", "FileInputStream", "RandomAccessFile",
        "Socket",       "ServerSocket",     "URL",             "HttpURLConnection",
        "Runtime",      "ProcessBuilder",
    };
    return banned;
}

std::vector<std::string> validate_test_case(const TestCase& tc, const MappingStore& store,
                                            const std::vector<std::string>& banned_tokens) {
    std::vector<std::string> violations;
    std::string stripped = strip_for_analysis(tc.code);

    // (a) single entry point
    const std::size_t mains = count_substring(stripped, "public static void main");
    if (mains != 1) {
        violations.push_back("entry-point: expected exactly one main entry point, found " +
                             std::to_string(mains));
    }

    const ApiRecord* record = store.find_record(tc.api_id);

    // The entry-point declaration is not an invocation.
    std::string body = stripped;
    if (const auto pos = body.find("public static void main"); pos != std::string::npos) {
        const auto main_pos = body.find("main", pos);
        body.replace(main_pos, 4, "    ");
    }

    std::set<std::string> store_method_names;
    for (const auto& r : store.records()) store_method_names.insert(r.signature.name);

    if (record) {
        // (b) exactly one target-API invocation
        const std::string& target = record->signature.name;
        std::size_t target_calls = 0;
        std::set<std::string> foreign_calls;
        for (const auto& [ident, is_call] : identifiers_with_call_flag(body)) {
            if (!is_call) continue;
            if (ident == target) {
                ++target_calls;
            } else if (store_method_names.contains(ident)) {
                foreign_calls.insert(ident);
            }
        }
        if (target_calls != 1) {
            violations.push_back("target-invocation: expected exactly one call to '" + target +
                                 "', found " + std::to_string(target_calls));
        }
        for (const auto& f : foreign_calls) {
            violations.push_back("target-invocation: foreign SDK API invoked: '" + f + "'");
        }

        // (c) allowlist
        std::set<std::string> allowed = kJavaKeywords;
        allowed.insert(kHarnessIdents.begin(), kHarnessIdents.end());
        allowed.insert(case_class_name(*record));
        allowed.insert(target);
        std::string segment;
        for (char c : record->signature.fq_class + ".") {
            if (c == '.') {
                if (!segment.empty()) allowed.insert(segment);
                segment.clear();
            } else {
                segment.push_back(c);
            }
        }
        std::set<std::string> reported;
        for (const auto& [ident, is_call] : identifiers_with_call_flag(stripped)) {
            if (allowed.contains(ident) || !reported.insert(ident).second) continue;
            violations.push_back("allowlist: unexpected identifier '" + ident + "'");
            if (reported.size() >= 10) break;
        }
    }

    // (d) SDK alignment
    if (!record) {
        violations.push_back("sdk-alignment: target API not present in the SDK " +
                             std::to_string(tc.sdk_version) + " store");
    } else if (tc.sdk_version != store.sdk_version()) {
        violations.push_back("sdk-alignment: test case targets SDK " +
                             std::to_string(tc.sdk_version) + " but store holds SDK " +
                             std::to_string(store.sdk_version()));
    }

    // (e) banned references
    for (const auto& token : banned_tokens) {
        if (contains_token(stripped, token)) {
            violations.push_back("banned-reference: '" + token + "'");
        }
    }
    return violations;
}

std::string TemplateRefiner::refine(const TestCase& tc, const std::vector<std::string>&,
                                    const ApiRecord* record) {
    if (!record) return tc.code;
    return render_template(*record, nullptr);
}

std::string ProviderRefiner::refine(const TestCase& tc, const std::vector<std::string>& violations,
                                    const ApiRecord* record) {
    std::string prompt =
        "This Java test case violates the self-containment rules. Rewrite it so every violation "
        "is resolved while still invoking the target method exactly once from a single public "
        "static void main entry point.\n";
    if (record) prompt += "Target method: " + record->signature.dotted() + "\n";
    prompt += "Violations:\n";
    for (const auto& v : violations) prompt += "- " + v + "\n";
    prompt += "Current code:\n" + tc.code + "\nRespond with only the corrected Java source.\n";

    int attempt = 0;
    while (true) {
        try {
            return strip_code_fences(provider_.complete(prompt));
        } catch (const PermapError& e) {
            if (e.code() != ErrorCode::provider_error || attempt >= retries_) return tc.code;
            ++attempt;
        }
    }
}

TestCase refine_loop(TestCase tc, const MappingStore& store, TestCaseRefiner& refiner,
                     int max_iterations, const std::vector<std::string>& banned_tokens) {
    std::vector<std::string> report = validate_test_case(tc, store, banned_tokens);
    if (report.empty()) {
        tc.status = CaseStatus::validated;
        return tc;
    }
    const ApiRecord* record = store.find_record(tc.api_id);
    for (int iteration = 1; iteration <= max_iterations; ++iteration) {
        tc.refinement_history.emplace_back(iteration, report);
        tc.code = refiner.refine(tc, report, record);
        report = validate_test_case(tc, store, banned_tokens);
        if (report.empty()) {
            tc.status = CaseStatus::validated;
            return tc;
        }
    }
    tc.status = CaseStatus::rejected;
    return tc;
}

} // namespace permap

#include "core/keyword_scan.hpp"

#include <cctype>

namespace permap {

namespace {

const std::set<std::string> kAccessModifiers = {"public", "protected", "private"};
const std::set<std::string> kAllModifiers = {
    "public", "protected", "private", "static",   "final",    "abstract",
    "native", "synchronized", "strictfp", "default",
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

struct LineTok {
    bool ident;
    std::string text;
};

std::vector<LineTok> tokenize_line(std::string_view line) {
    std::vector<LineTok> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < line.size() && ident_char(line[j])) ++j;
            toks.push_back({true, std::string(line.substr(i, j - i))});
            i = j;
            continue;
        }
        toks.push_back({false, std::string(1, c)});
        ++i;
    }
    return toks;
}

// Comment- and string-stripping state carried across lines.
struct StripState {
    bool in_block_comment = false;
};

std::string strip_line(std::string_view line, StripState& st) {
    std::string out;
    out.reserve(line.size());
    std::size_t i = 0;
    while (i < line.size()) {
        if (st.in_block_comment) {
            if (line[i] == '*' && i + 1 < line.size() && line[i + 1] == '/') {
                st.in_block_comment = false;
                i += 2;
                continue;
            }
            ++i;
            continue;
        }
        const char c = line[i];
        if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') break;
        if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
            st.in_block_comment = true;
            i += 2;
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            out.push_back(quote);
            ++i;
            while (i < line.size() && line[i] != quote) {
                if (line[i] == '\\') ++i;
                if (i < line.size()) ++i;
            }
            if (i < line.size()) {
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

// Type := Name(.Name)* <generics skipped> ([])*; returns erased spelling.
bool parse_line_type(const std::vector<LineTok>& toks, std::size_t& i, std::string& out) {
    if (i >= toks.size() || !toks[i].ident) return false;
    out = toks[i++].text;
    while (i < toks.size()) {
        if (!toks[i].ident && toks[i].text == "<") {
            int depth = 1;
            ++i;
            while (i < toks.size() && depth > 0) {
                if (!toks[i].ident && toks[i].text == "<") ++depth;
                if (!toks[i].ident && toks[i].text == ">") --depth;
                ++i;
            }
            if (depth != 0) return false;
            continue;
        }
        if (!toks[i].ident && toks[i].text == "." && i + 1 < toks.size() && toks[i + 1].ident) {
            out += "." + toks[i + 1].text;
            i += 2;
            continue;
        }
        break;
    }
    while (i + 1 < toks.size() && !toks[i].ident && toks[i].text == "[" && !toks[i + 1].ident &&
           toks[i + 1].text == "]") {
        out += "[]";
        i += 2;
    }
    return true;
}

bool parse_line_params(const std::vector<LineTok>& toks, std::size_t open, std::size_t close,
                       std::vector<std::string>& out) {
    std::size_t i = open + 1;
    if (i == close) return true;
    while (i < close) {
        // One parameter: optional annotations and 'final', then type, then name.
        while (i < close && !toks[i].ident && toks[i].text == "@") {
            ++i;
            if (i < close && toks[i].ident) ++i;
            if (i < close && !toks[i].ident && toks[i].text == "(") {
                int depth = 1;
                ++i;
                while (i < close && depth > 0) {
                    if (!toks[i].ident && toks[i].text == "(") ++depth;
                    if (!toks[i].ident && toks[i].text == ")") --depth;
                    ++i;
                }
            }
        }
        if (i < close && toks[i].ident && toks[i].text == "final") ++i;
        std::string type;
        if (!parse_line_type(toks, i, type)) return false;
        if (i + 2 < close && !toks[i].ident && toks[i].text == "." && toks[i + 1].text == "." &&
            toks[i + 2].text == ".") {
            type += "[]";
            i += 3;
        }
        if (i >= close || !toks[i].ident) return false;
        ++i;  // parameter name
        while (i + 1 < close && !toks[i].ident && toks[i].text == "[" && toks[i + 1].text == "]") {
            type += "[]";
            i += 2;
        }
        out.push_back(std::move(type));
        if (i == close) return true;
        if (toks[i].ident || toks[i].text != ",") return false;
        ++i;
    }
    return false;
}

std::optional<KeywordMatch> match_declaration_line(const std::string& line, int line_no,
                                                   const std::vector<std::string>& keywords) {
    std::vector<LineTok> toks = tokenize_line(line);
    std::size_t i = 0;

    // Leading annotations such as `@Override public void f()` on one line.
    while (i < toks.size() && !toks[i].ident && toks[i].text == "@") {
        ++i;
        if (i < toks.size() && toks[i].ident) ++i;
        if (i < toks.size() && !toks[i].ident && toks[i].text == "(") {
            int depth = 1;
            ++i;
            while (i < toks.size() && depth > 0) {
                if (!toks[i].ident && toks[i].text == "(") ++depth;
                if (!toks[i].ident && toks[i].text == ")") --depth;
                ++i;
            }
            if (depth != 0) return std::nullopt;
        }
    }

    std::set<std::string> modifiers;
    while (i < toks.size() && toks[i].ident && kAllModifiers.contains(toks[i].text)) {
        modifiers.insert(toks[i].text);
        ++i;
    }
    bool has_access = false;
    for (const auto& m : modifiers) has_access |= kAccessModifiers.contains(m);
    if (!has_access) return std::nullopt;

    std::string return_type;
    if (!parse_line_type(toks, i, return_type)) return std::nullopt;
    if (i >= toks.size() || !toks[i].ident) return std::nullopt;
    const std::string name = toks[i].text;
    ++i;
    if (i >= toks.size() || toks[i].ident || toks[i].text != "(") return std::nullopt;

    const std::size_t open = i;
    int depth = 0;
    std::size_t close = open;
    for (; close < toks.size(); ++close) {
        if (!toks[close].ident && toks[close].text == "(") ++depth;
        if (!toks[close].ident && toks[close].text == ")") {
            --depth;
            if (depth == 0) break;
        }
    }
    if (close >= toks.size()) return std::nullopt;

    std::size_t after = close + 1;
    if (after < toks.size()) {
        const LineTok& t = toks[after];
        const bool ok_tail = (!t.ident && (t.text == "{" || t.text == ";")) ||
                             (t.ident && t.text == "throws");
        if (!ok_tail) return std::nullopt;
    }

    std::vector<std::string> params;
    if (!parse_line_params(toks, open, close, params)) return std::nullopt;

    KeywordMatch m;
    m.signature.fq_class = "_";
    m.signature.name = name;
    m.signature.return_type = return_type;
    m.signature.param_types = std::move(params);
    m.signature.modifiers = std::move(modifiers);
    m.line = line_no;
    for (const auto& seg : camel_segments(name)) {
        for (const auto& kw : keywords) {
            if (seg.starts_with(kw)) {
                m.trigger_keyword = kw;
                break;
            }
        }
        if (m.trigger_keyword) break;
    }
    return m;
}

} // namespace

const std::vector<std::string>& default_trigger_keywords() {
    static const std::vector<std::string> kw = {"get", "set", "create", "request", "manage"};
    return kw;
}

std::vector<std::string> camel_segments(std::string_view name) {
    std::vector<std::string> segments;
    std::string current;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        if (c == '_' || c == '$') {
            if (!current.empty()) segments.push_back(std::move(current));
            current.clear();
            continue;
        }
        const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        if (upper && !current.empty()) {
            const char prev = current.back();
            const bool prev_upper = std::isupper(static_cast<unsigned char>(prev)) != 0;
            const bool next_lower =
                i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
            if (!prev_upper || next_lower) {
                segments.push_back(std::move(current));
                current.clear();
            }
        }
        current.push_back(c);
    }
    if (!current.empty()) segments.push_back(std::move(current));
    return segments;
}

std::vector<KeywordMatch> keyword_scan(std::string_view file_text,
                                       const std::vector<std::string>& trigger_keywords) {
    std::vector<KeywordMatch> out;
    StripState st;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= file_text.size()) {
        const std::size_t nl = file_text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? file_text.size() : nl;
        ++line_no;
        const std::string stripped = strip_line(file_text.substr(pos, end - pos), st);
        if (auto m = match_declaration_line(stripped, line_no, trigger_keywords)) {
            out.push_back(std::move(*m));
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

FileOutline scan_file_outline(std::string_view file_text) {
    FileOutline outline;
    StripState st;
    std::size_t pos = 0;
    while (pos <= file_text.size()) {
        const std::size_t nl = file_text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? file_text.size() : nl;
        const std::string line = strip_line(file_text.substr(pos, end - pos), st);
        const std::vector<LineTok> toks = tokenize_line(line);
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (!toks[i].ident) continue;
            if (outline.package_name.empty() && toks[i].text == "package" && i + 1 < toks.size()) {
                std::string dotted;
                std::size_t j = i + 1;
                while (j < toks.size() && toks[j].ident) {
                    if (!dotted.empty()) dotted += ".";
                    dotted += toks[j].text;
                    ++j;
                    if (j < toks.size() && !toks[j].ident && toks[j].text == ".") ++j;
                    else break;
                }
                outline.package_name = dotted;
            }
            if (outline.primary_type.empty() &&
                (toks[i].text == "class" || toks[i].text == "interface" || toks[i].text == "enum") &&
                i + 1 < toks.size() && toks[i + 1].ident) {
                outline.primary_type = toks[i + 1].text;
            }
        }
        if (!outline.package_name.empty() && !outline.primary_type.empty()) break;
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return outline;
}

} // namespace permap

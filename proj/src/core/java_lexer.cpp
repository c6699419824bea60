#include "core/java_lexer.hpp"

#include <cctype>

namespace permap {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

} // namespace

LexResult lex_java(std::string_view src) {
    LexResult res;
    std::size_t i = 0;
    const std::size_t n = src.size();
    int line = 1;

    auto fail = [&](const std::string& why, int at_line) {
        res.ok = false;
        res.error = why;
        res.error_line = at_line;
        return res;
    };

    while (i < n) {
        const char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            std::size_t j = i + 2;
            while (j < n && src[j] != '\n') ++j;
            res.comments.push_back({std::string(src.substr(i + 2, j - i - 2)), line, line, false});
            i = j;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            const int start_line = line;
            std::size_t j = i + 2;
            while (j + 1 < n && !(src[j] == '*' && src[j + 1] == '/')) {
                if (src[j] == '\n') ++line;
                ++j;
            }
            if (j + 1 >= n) return fail("unterminated block comment", start_line);
            res.comments.push_back({std::string(src.substr(i + 2, j - i - 2)), start_line, line, true});
            i = j + 2;
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            const int start_line = line;
            std::size_t j = i + 1;
            while (j < n && src[j] != quote) {
                if (src[j] == '\\' && j + 1 < n) {
                    j += 2;
                    continue;
                }
                if (src[j] == '\n') {
                    // Java string/char literals do not span lines.
                    return fail("unterminated literal", start_line);
                }
                ++j;
            }
            if (j >= n) return fail("unterminated literal", start_line);
            res.tokens.push_back({quote == '"' ? TokKind::string_lit : TokKind::char_lit,
                                  std::string(src.substr(i + 1, j - i - 1)), start_line, i, j - i + 1});
            i = j + 1;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < n && ident_char(src[j])) ++j;
            res.tokens.push_back({TokKind::identifier, std::string(src.substr(i, j - i)), line, i, j - i});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;
            while (j < n) {
                const char d = src[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ++j;
                    continue;
                }
                // Decimal point or exponent sign inside a numeric literal.
                if (d == '.' && j + 1 < n && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                    ++j;
                    continue;
                }
                if ((d == '+' || d == '-') && (src[j - 1] == 'e' || src[j - 1] == 'E')) {
                    ++j;
                    continue;
                }
                break;
            }
            res.tokens.push_back({TokKind::number, std::string(src.substr(i, j - i)), line, i, j - i});
            i = j;
            continue;
        }
        if (c == '.' && i + 2 < n && src[i + 1] == '.' && src[i + 2] == '.') {
            res.tokens.push_back({TokKind::punct, "...", line, i, 3});
            i += 3;
            continue;
        }
        res.tokens.push_back({TokKind::punct, std::string(1, c), line, i, 1});
        ++i;
    }
    res.ok = true;
    return res;
}

} // namespace permap

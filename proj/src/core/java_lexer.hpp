#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace permap {

enum class TokKind { identifier, number, string_lit, char_lit, punct };

struct Token {
    TokKind kind;
    std::string text;
    int line = 0;
    std::size_t offset = 0;  // byte offset into the source
    std::size_t length = 0;
};

struct CommentSpan {
    std::string text;     // without delimiters
    int start_line = 0;
    int end_line = 0;
    bool block = false;   // true for /* */ and /** */
};

struct LexResult {
    bool ok = false;
    std::string error;
    int error_line = 0;
    std::vector<Token> tokens;
    std::vector<CommentSpan> comments;
};

// Tokenizes Java-style source. Comments are collected separately; `...` is a
// single punct token, every other operator is lexed one character at a time.
// Fails only on unterminated block comments and string/char literals.
LexResult lex_java(std::string_view source);

} // namespace permap

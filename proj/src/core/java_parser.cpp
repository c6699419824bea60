#include "core/java_parser.hpp"

#include "core/java_lexer.hpp"

#include <algorithm>
#include <set>

namespace permap {

namespace {

const std::set<std::string> kModifiers = {
    "public", "protected", "private", "static",   "final",    "abstract",
    "native", "synchronized", "strictfp", "default", "transient", "volatile",
};

struct ParseFail {
    std::string why;
    int line;
};

class Parser {
public:
    Parser(std::string_view src, LexResult lexed) : src_(src), lexed_(std::move(lexed)) {}

    ParseResult run() {
        ParseResult out;
        try {
            parse_compilation_unit();
            out.ok = true;
            out.package_name = package_;
            out.methods = std::move(methods_);
            out.method_line_spans = std::move(spans_);
        } catch (const ParseFail& f) {
            out.ok = false;
            out.error = f.why;
            out.error_line = f.line;
        }
        return out;
    }

private:
    std::string_view src_;
    LexResult lexed_;
    std::size_t pos_ = 0;
    std::string package_;
    std::vector<ParsedMethod> methods_;
    std::vector<std::pair<int, int>> spans_;

    bool at_end() const { return pos_ >= lexed_.tokens.size(); }

    const Token& peek(std::size_t ahead = 0) const {
        static const Token eof{TokKind::punct, "", 0, 0, 0};
        if (pos_ + ahead >= lexed_.tokens.size()) return eof;
        return lexed_.tokens[pos_ + ahead];
    }

    const Token& advance() {
        if (at_end()) fail("unexpected end of file");
        return lexed_.tokens[pos_++];
    }

    [[noreturn]] void fail(const std::string& why) const {
        const int line = at_end() ? (lexed_.tokens.empty() ? 1 : lexed_.tokens.back().line)
                                  : peek().line;
        throw ParseFail{why, line};
    }

    bool is_punct(const Token& t, std::string_view text) const {
        return t.kind == TokKind::punct && t.text == text;
    }

    bool is_ident(const Token& t, std::string_view text) const {
        return t.kind == TokKind::identifier && t.text == text;
    }

    void expect_punct(std::string_view text) {
        if (!is_punct(peek(), text)) fail("expected '" + std::string(text) + "'");
        ++pos_;
    }

    // --- compilation unit ------------------------------------------------

    void parse_compilation_unit() {
        while (!at_end()) {
            const Token& t = peek();
            if (is_ident(t, "package")) {
                ++pos_;
                package_ = parse_dotted_name();
                expect_punct(";");
                continue;
            }
            if (is_ident(t, "import")) {
                skip_until_semicolon();
                continue;
            }
            if (is_punct(t, ";")) {
                ++pos_;
                continue;
            }
            parse_type_declaration(package_);
        }
    }

    std::string parse_dotted_name() {
        if (peek().kind != TokKind::identifier) fail("expected identifier");
        std::string name = advance().text;
        while (is_punct(peek(), ".") && peek(1).kind == TokKind::identifier) {
            pos_ += 2;
            name += "." + lexed_.tokens[pos_ - 1].text;
        }
        return name;
    }

    void skip_until_semicolon() {
        while (!at_end() && !is_punct(peek(), ";")) ++pos_;
        if (at_end()) fail("expected ';'");
        ++pos_;
    }

    // Skips annotations and modifiers, then requires class/interface/enum.
    void parse_type_declaration(const std::string& enclosing) {
        while (true) {
            if (is_punct(peek(), "@") && !is_ident(peek(1), "interface")) {
                skip_annotation();
                continue;
            }
            if (peek().kind == TokKind::identifier && kModifiers.contains(peek().text)) {
                ++pos_;
                continue;
            }
            break;
        }
        if (is_punct(peek(), "@") && is_ident(peek(1), "interface")) {
            pos_ += 2;
            parse_type_header_and_body(enclosing);
            return;
        }
        if (is_ident(peek(), "class") || is_ident(peek(), "interface") || is_ident(peek(), "enum")) {
            const bool is_enum = peek().text == "enum";
            ++pos_;
            parse_type_header_and_body(enclosing, is_enum);
            return;
        }
        fail("expected type declaration");
    }

    void parse_type_header_and_body(const std::string& enclosing, bool is_enum = false) {
        if (peek().kind != TokKind::identifier) fail("expected type name");
        const std::string name = advance().text;
        const std::string fq = enclosing.empty() ? name : enclosing + "." + name;
        while (!at_end() && !is_punct(peek(), "{")) {
            if (is_punct(peek(), "<")) {
                skip_generics();
                continue;
            }
            if (is_punct(peek(), ";")) {
                // Forward-style declaration without a body.
                ++pos_;
                return;
            }
            ++pos_;  // extends / implements clauses
        }
        expect_punct("{");
        if (is_enum) skip_enum_constants();
        parse_type_body(fq);
    }

    // Enum constants run until the member separator ';' or the closing '}'.
    void skip_enum_constants() {
        while (!at_end()) {
            const Token& t = peek();
            if (is_punct(t, "(")) {
                skip_balanced("(", ")");
                continue;
            }
            if (is_punct(t, "{")) {
                skip_balanced("{", "}");
                continue;
            }
            if (is_punct(t, ";")) {
                ++pos_;
                return;
            }
            if (is_punct(t, "}")) return;  // constants only, '}' consumed by body loop
            ++pos_;
        }
        fail("unterminated enum body");
    }

    void parse_type_body(const std::string& fq) {
        while (true) {
            if (at_end()) fail("unterminated type body");
            if (is_punct(peek(), "}")) {
                ++pos_;
                return;
            }
            parse_member(fq);
        }
    }

    void skip_annotation() {
        expect_punct("@");
        parse_dotted_name();
        if (is_punct(peek(), "(")) skip_balanced("(", ")");
    }

    // Captures the raw source of one annotation, advancing past it.
    std::string read_annotation(int* first_line) {
        const Token& at = peek();
        if (first_line && *first_line == 0) *first_line = at.line;
        const std::size_t start = at.offset;
        expect_punct("@");
        parse_dotted_name();
        std::size_t end = lexed_.tokens[pos_ - 1].offset + lexed_.tokens[pos_ - 1].length;
        if (is_punct(peek(), "(")) {
            skip_balanced("(", ")");
            end = lexed_.tokens[pos_ - 1].offset + lexed_.tokens[pos_ - 1].length;
        }
        return std::string(src_.substr(start, end - start));
    }

    void skip_balanced(std::string_view open, std::string_view close) {
        expect_punct(open);
        int depth = 1;
        while (depth > 0) {
            if (at_end()) fail("unbalanced '" + std::string(open) + "'");
            const Token& t = advance();
            if (is_punct(t, open)) ++depth;
            else if (is_punct(t, close)) --depth;
        }
    }

    void skip_generics() {
        expect_punct("<");
        int depth = 1;
        while (depth > 0) {
            if (at_end()) fail("unbalanced '<'");
            const Token& t = advance();
            if (is_punct(t, "<")) ++depth;
            else if (is_punct(t, ">")) --depth;
        }
    }

    // Type := void | Name(.Name)* with generics erased, then array suffixes.
    std::string parse_type_erased() {
        if (peek().kind != TokKind::identifier) fail("expected type");
        std::string type = advance().text;
        while (true) {
            if (is_punct(peek(), "<")) {
                skip_generics();
                continue;
            }
            if (is_punct(peek(), ".") && peek(1).kind == TokKind::identifier) {
                pos_ += 2;
                type += "." + lexed_.tokens[pos_ - 1].text;
                continue;
            }
            break;
        }
        while (is_punct(peek(), "[") && is_punct(peek(1), "]")) {
            pos_ += 2;
            type += "[]";
        }
        return type;
    }

    std::vector<std::string> parse_params() {
        expect_punct("(");
        std::vector<std::string> params;
        if (is_punct(peek(), ")")) {
            ++pos_;
            return params;
        }
        while (true) {
            while (is_punct(peek(), "@")) skip_annotation();
            if (is_ident(peek(), "final")) ++pos_;
            std::string type = parse_type_erased();
            if (is_punct(peek(), "...")) {
                ++pos_;
                type += "[]";
            }
            if (peek().kind != TokKind::identifier) fail("expected parameter name");
            ++pos_;
            while (is_punct(peek(), "[") && is_punct(peek(1), "]")) {
                pos_ += 2;
                type += "[]";
            }
            params.push_back(std::move(type));
            if (is_punct(peek(), ",")) {
                ++pos_;
                continue;
            }
            expect_punct(")");
            return params;
        }
    }

    // Field declarator tail. `= ;` (missing initializer) is a parse error.
    void skip_field_tail() {
        int depth = 0;
        while (!at_end()) {
            const Token& t = peek();
            if (is_punct(t, "(") || is_punct(t, "{") || is_punct(t, "[")) {
                ++depth;
                ++pos_;
                continue;
            }
            if (is_punct(t, ")") || is_punct(t, "}") || is_punct(t, "]")) {
                if (depth == 0) fail("unbalanced field declaration");
                --depth;
                ++pos_;
                continue;
            }
            if (depth == 0 && is_punct(t, "=") && is_punct(peek(1), ";")) {
                fail("missing field initializer");
            }
            if (depth == 0 && is_punct(t, ";")) {
                ++pos_;
                return;
            }
            ++pos_;
        }
        fail("unterminated field declaration");
    }

    std::string find_doc_comment(int decl_first_line) const {
        const CommentSpan* best = nullptr;
        for (const auto& c : lexed_.comments) {
            if (!c.block) continue;
            if (c.end_line > decl_first_line) break;
            if (decl_first_line - c.end_line <= 2) best = &c;
        }
        return best ? best->text : std::string();
    }

    void parse_member(const std::string& fq) {
        int decl_first_line = 0;
        std::vector<std::string> annotations;
        std::set<std::string> modifiers;

        // Annotations and modifiers interleave freely: `public @Nullable ...`.
        while (true) {
            if (is_punct(peek(), "@") && !is_ident(peek(1), "interface")) {
                annotations.push_back(read_annotation(&decl_first_line));
                continue;
            }
            if (peek().kind == TokKind::identifier && kModifiers.contains(peek().text)) {
                if (decl_first_line == 0) decl_first_line = peek().line;
                modifiers.insert(advance().text);
                continue;
            }
            break;
        }

        if (is_ident(peek(), "class") || is_ident(peek(), "interface") || is_ident(peek(), "enum")) {
            const bool is_enum = peek().text == "enum";
            ++pos_;
            parse_type_header_and_body(fq, is_enum);
            return;
        }
        if (is_punct(peek(), "@") && is_ident(peek(1), "interface")) {
            pos_ += 2;
            parse_type_header_and_body(fq);
            return;
        }
        if (is_punct(peek(), "{")) {
            // Instance or static initializer block.
            skip_balanced("{", "}");
            return;
        }
        if (is_punct(peek(), ";")) {
            ++pos_;
            return;
        }

        if (is_punct(peek(), "<")) {
            if (decl_first_line == 0) decl_first_line = peek().line;
            skip_generics();
        }

        if (peek().kind != TokKind::identifier) fail("expected member declaration");
        if (decl_first_line == 0) decl_first_line = peek().line;
        const std::string return_type = parse_type_erased();

        if (is_punct(peek(), "(")) {
            // Constructor: skip its parameters and body.
            skip_balanced("(", ")");
            skip_member_tail_after_params();
            return;
        }

        if (peek().kind != TokKind::identifier) fail("expected member name");
        const Token& name_tok = advance();

        if (!is_punct(peek(), "(")) {
            skip_field_tail();
            return;
        }

        ParsedMethod m;
        m.signature.fq_class = fq;
        m.signature.name = name_tok.text;
        m.signature.return_type = return_type;
        m.signature.modifiers = modifiers;
        m.signature.param_types = parse_params();
        m.line = name_tok.line;
        m.annotations = annotations;
        m.doc_comment = find_doc_comment(decl_first_line);

        // Trailing array dims apply to the return type.
        while (is_punct(peek(), "[") && is_punct(peek(1), "]")) {
            pos_ += 2;
            m.signature.return_type += "[]";
        }
        if (is_ident(peek(), "throws")) {
            ++pos_;
            parse_dotted_name();
            while (is_punct(peek(), ",")) {
                ++pos_;
                parse_dotted_name();
            }
        }
        int end_line = name_tok.line;
        if (is_ident(peek(), "default")) {
            // Annotation-type element default value.
            skip_until_semicolon();
            end_line = lexed_.tokens[pos_ - 1].line;
        } else if (is_punct(peek(), "{")) {
            const Token& open = peek();
            skip_balanced("{", "}");
            const Token& close = lexed_.tokens[pos_ - 1];
            m.body_text = std::string(src_.substr(open.offset, close.offset + close.length - open.offset));
            end_line = close.line;
        } else if (is_punct(peek(), ";")) {
            ++pos_;
        } else {
            fail("expected method body or ';'");
        }

        for (const auto& a : annotations) {
            std::string head = a.substr(1, a.find_first_of("( \t\n") - 1);
            if (const auto dot = head.rfind('.'); dot != std::string::npos) head = head.substr(dot + 1);
            if (head == "Deprecated") m.deprecated = true;
        }
        if (m.doc_comment.find("@deprecated") != std::string::npos) m.deprecated = true;

        spans_.emplace_back(decl_first_line, std::max(end_line, decl_first_line));
        methods_.push_back(std::move(m));
    }

    void skip_member_tail_after_params() {
        if (is_ident(peek(), "throws")) {
            ++pos_;
            parse_dotted_name();
            while (is_punct(peek(), ",")) {
                ++pos_;
                parse_dotted_name();
            }
        }
        if (is_punct(peek(), "{")) {
            skip_balanced("{", "}");
            return;
        }
        expect_punct(";");
    }
};

} // namespace

ParseResult parse_file_methods(std::string_view file_text) {
    LexResult lexed = lex_java(file_text);
    if (!lexed.ok) {
        ParseResult out;
        out.ok = false;
        out.error = lexed.error;
        out.error_line = lexed.error_line;
        return out;
    }
    return Parser(file_text, std::move(lexed)).run();
}

} // namespace permap

#include "core/canonical.hpp"

#include "core/errors.hpp"

#include <cctype>

namespace permap {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_upper_snake(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isupper(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return std::isupper(static_cast<unsigned char>(s.front())) != 0;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

constexpr std::string_view kPermissionInfix = ".permission.";

} // namespace

bool matches_permission_grammar(std::string_view name) {
    const auto pos = name.rfind(kPermissionInfix);
    if (pos == std::string_view::npos) return false;
    const std::string_view prefix = name.substr(0, pos);
    const std::string_view suffix = name.substr(pos + kPermissionInfix.size());
    if (prefix.empty() || suffix.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(prefix.front()))) return false;
    for (char c : prefix) {
        if (!is_word_char(c) && c != '.') return false;
    }
    for (char c : suffix) {
        if (!(std::isupper(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

std::optional<std::string> try_canonicalize_permission(std::string_view name) {
    const std::string_view s = trim(name);
    if (s.empty()) return std::nullopt;

    constexpr std::string_view kManifest = "Manifest.permission.";
    constexpr std::string_view kAndroidManifest = "android.Manifest.permission.";

    std::string_view constant;
    if (s.starts_with(kAndroidManifest)) {
        constant = s.substr(kAndroidManifest.size());
    } else if (s.starts_with(kManifest)) {
        constant = s.substr(kManifest.size());
    }
    if (!constant.empty()) {
        if (!is_upper_snake(constant)) return std::nullopt;
        return "android.permission." + std::string(constant);
    }
    if (is_upper_snake(s)) {
        return "android.permission." + std::string(s);
    }
    if (matches_permission_grammar(s)) {
        return std::string(s);
    }
    return std::nullopt;
}

std::string canonicalize_permission(std::string_view name) {
    auto canonical = try_canonicalize_permission(name);
    if (!canonical) {
        throw PermapError(ErrorCode::canonicalization_error,
                          "cannot canonicalize permission name: '" + std::string(trim(name)) + "'");
    }
    return *canonical;
}

std::set<std::string> scan_permission_tokens(std::string_view text) {
    std::set<std::string> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_word_char(text[i]) && text[i] != '.') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && (is_word_char(text[j]) || text[j] == '.')) ++j;
        std::string_view token = text.substr(i, j - i);
        i = j;
        while (!token.empty() && token.front() == '.') token.remove_prefix(1);
        while (!token.empty() && token.back() == '.') token.remove_suffix(1);
        if (token.find(kPermissionInfix) == std::string_view::npos) continue;
        if (auto canonical = try_canonicalize_permission(token);
            canonical && matches_permission_grammar(*canonical)) {
            out.insert(std::move(*canonical));
        }
    }
    return out;
}

} // namespace permap

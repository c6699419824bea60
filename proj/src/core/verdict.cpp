#include "core/verdict.hpp"

#include "core/canonical.hpp"

#include <nlohmann/json.hpp>

namespace permap {

using nlohmann::json;

namespace {

bool trim_view(const std::string& s, std::size_t& begin, std::size_t& end) {
    begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return false;
    end = s.find_last_not_of(" \t\r\n") + 1;
    return true;
}

} // namespace

AnalysisVerdict parse_verdict(const std::string& raw, Role role) {
    AnalysisVerdict v;
    v.role = role;
    v.raw_response = raw;

    std::size_t begin = 0;
    std::size_t end = 0;
    if (!trim_view(raw, begin, end)) {
        v.parse_warning = true;
        return v;
    }

    json j = json::parse(raw.begin() + static_cast<std::ptrdiff_t>(begin),
                         raw.begin() + static_cast<std::ptrdiff_t>(end),
                         nullptr, /*allow_exceptions=*/false);
    if (j.is_object() && j.contains("requires_permission") && j["requires_permission"].is_boolean()) {
        v.strict_parse = true;
        v.requires_permission = j["requires_permission"].get<bool>();
        if (v.requires_permission && j.contains("permissions") && j["permissions"].is_array()) {
            for (const auto& p : j["permissions"]) {
                if (!p.is_string()) continue;
                if (auto c = try_canonicalize_permission(p.get<std::string>())) {
                    v.permissions.insert(std::move(*c));
                }
            }
        }
        if (j.contains("rationale") && j["rationale"].is_string()) {
            v.rationale = j["rationale"].get<std::string>();
        }
        return v;
    }

    // Fallback: chatty providers get a token scan over the whole response.
    v.permissions = scan_permission_tokens(raw);
    v.requires_permission = !v.permissions.empty();
    return v;
}

MergedCandidate merge_verdicts(const AnalysisVerdict& detector, const AnalysisVerdict& analyst,
                               const std::set<std::string>& declared) {
    MergedCandidate m;
    m.permissions = declared;
    m.permissions.insert(detector.permissions.begin(), detector.permissions.end());
    m.permissions.insert(analyst.permissions.begin(), analyst.permissions.end());

    if (!declared.empty()) m.provenance.insert("annotation");
    bool predicted = false;
    for (const AnalysisVerdict* v : {&detector, &analyst}) {
        if (v->permissions.empty()) continue;
        m.provenance.insert(to_string(v->role));
        predicted = true;
    }
    m.confidence = predicted ? Confidence::predicted : Confidence::declared;
    return m;
}

} // namespace permap

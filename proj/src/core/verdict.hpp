#pragma once

#include "core/prompts.hpp"
#include "core/records.hpp"

#include <string>

namespace permap {

struct AnalysisVerdict {
    Role role = Role::detector;
    bool requires_permission = false;
    std::set<std::string> permissions;
    std::string rationale;
    std::string raw_response;
    bool strict_parse = false;   // true when the JSON path produced the verdict
    bool parse_warning = false;  // empty or unusable response
};

// Total over arbitrary bytes. Strict path parses a JSON object with keys
// {requires_permission, permissions, rationale}; the fallback scans the text
// for permission-grammar tokens and sets requires_permission accordingly.
AnalysisVerdict parse_verdict(const std::string& raw, Role role);

struct MergedCandidate {
    std::set<std::string> permissions;  // declared ∪ detector ∪ analyst
    std::set<std::string> provenance;
    Confidence confidence = Confidence::declared;
};

// Union rule: role disagreement widens the candidate, declared permissions
// are never removed. Confidence stays `declared` only when no role
// contributed anything.
MergedCandidate merge_verdicts(const AnalysisVerdict& detector, const AnalysisVerdict& analyst,
                               const std::set<std::string>& declared);

} // namespace permap

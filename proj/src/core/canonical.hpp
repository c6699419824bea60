#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace permap {

// Canonical permission names look like `android.permission.CAMERA` or a
// vendor-prefixed equivalent such as `com.vendor.permission.PAY`.
//
// canonicalize_permission applies:
//   - bare UPPER_SNAKE names gain the `android.permission.` prefix
//   - `Manifest.permission.X` / `android.Manifest.permission.X` map to
//     `android.permission.X`
//   - dotted names already in canonical form pass through unchanged
// The function is idempotent. Empty or unrecognizable input is an error.
std::string canonicalize_permission(std::string_view name);

// Total variant: never throws, returns nullopt for unusable input.
std::optional<std::string> try_canonicalize_permission(std::string_view name);

// True iff `name` matches the canonical grammar
// `[a-zA-Z][\w.]*\.permission\.[A-Z0-9_]+`.
bool matches_permission_grammar(std::string_view name);

// Scans free text for tokens matching the canonical permission grammar
// (including the `Manifest.permission.X` spellings) and returns them
// canonicalized and sorted. Total over arbitrary bytes.
std::set<std::string> scan_permission_tokens(std::string_view text);

} // namespace permap

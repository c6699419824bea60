#pragma once

#include "core/records.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace permap {

enum class Role { detector, analyst };

const char* to_string(Role r);

struct RoleProfile {
    Role role;
    std::string instruction;
};

// The two built-in role charges of the dual-role prompting strategy.
RoleProfile default_role_profile(Role role);

struct Demonstration {
    std::string code_snippet;
    std::string comment;                // may be empty
    bool permission_required = false;
    std::set<std::string> permissions;  // nonempty iff permission_required
};

// Bundled quartet: explicit-required, name-implied, implicit-required and
// permission-free.
const std::vector<Demonstration>& default_demonstrations();

// JSON array of {code, comment, label: "required"|"free", permissions: [...]}.
std::vector<Demonstration> load_demonstrations(const std::filesystem::path& file);

struct PromptBundle {
    RoleProfile role_profile;
    std::vector<Demonstration> demonstrations;
    std::string target_signature;  // dotted spelling
    std::string target_doc_comment;
    std::string target_body;
    int sdk_version = 0;
    std::string rendered;
};

// Renders instruction, demonstrations (each with its label), the target code
// and comment, and the output-format directive, in that order. Rendering is
// byte-deterministic. Throws a prompt error when demonstrations are missing a
// required/free example or the rendering exceeds max_chars; the caller
// truncates body text, never demonstrations.
PromptBundle build_prompt(const RoleProfile& role, const std::vector<Demonstration>& demos,
                          const ApiRecord& record, std::size_t max_chars);

} // namespace permap

#include "core/prompts.hpp"

#include "core/canonical.hpp"
#include "core/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace permap {

using nlohmann::json;

const char* to_string(Role r) {
    return r == Role::detector ? "detector" : "analyst";
}

RoleProfile default_role_profile(Role role) {
    if (role == Role::detector) {
        return {Role::detector,
                "Acts as a Permission Detector, identifying permission usages in the Java method "
                "by checking for invoked API calls that involve permissions."};
    }
    return {Role::analyst,
            "Act as a Permission Analyst, analyzing Java method functions to infer necessary "
            "permissions based on their operational characteristics. Android permissions are more "
            "likely involved in functions like Hardware Access, Network Access, Storage Access, "
            "Location Access, Media Access, and System Tools."};
}

const std::vector<Demonstration>& default_demonstrations() {
    static const std::vector<Demonstration> demos = {
        {
            "@RequiresPermission(Manifest.permission.CAMERA)\n"
            "public void capturePhoto() {\n"
            "    mCameraClient.capture();\n"
            "}\n",
            "Captures a still image from the device camera.",
            true,
            {"android.permission.CAMERA"},
        },
        {
            "public boolean hasLocationPermission() {\n"
            "    return checkCallingPermission(\"android.permission.ACCESS_FINE_LOCATION\")\n"
            "            == PackageManager.PERMISSION_GRANTED;\n"
            "}\n",
            "",
            true,
            {"android.permission.ACCESS_FINE_LOCATION"},
        },
        {
            "public boolean isGPSEnabled() {\n"
            "    return mLocationManager.isProviderEnabled(LocationManager.GPS_PROVIDER);\n"
            "}\n",
            "Returns whether the GPS provider is currently enabled.",
            true,
            {"android.permission.ACCESS_FINE_LOCATION"},
        },
        {
            "public static String formatDuration(long millis) {\n"
            "    return Long.toString(millis / 1000) + \"s\";\n"
            "}\n",
            "Renders a millisecond duration as seconds.",
            false,
            {},
        },
    };
    return demos;
}

std::vector<Demonstration> load_demonstrations(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw PermapError(ErrorCode::config_error, "cannot open demonstrations file: " + file.string());
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw PermapError(ErrorCode::config_error, "malformed demonstrations file: " + file.string());
    }
    std::vector<Demonstration> demos;
    for (const auto& item : j) {
        Demonstration d;
        d.code_snippet = item.at("code").get<std::string>();
        if (item.contains("comment")) d.comment = item["comment"].get<std::string>();
        const std::string label = item.at("label").get<std::string>();
        if (label == "required") {
            d.permission_required = true;
            for (const auto& p : item.at("permissions")) {
                d.permissions.insert(canonicalize_permission(p.get<std::string>()));
            }
            if (d.permissions.empty()) {
                throw PermapError(ErrorCode::config_error,
                                  "required demonstration without permissions in " + file.string());
            }
        } else if (label != "free") {
            throw PermapError(ErrorCode::config_error, "demonstration label must be required|free");
        }
        demos.push_back(std::move(d));
    }
    return demos;
}

PromptBundle build_prompt(const RoleProfile& role, const std::vector<Demonstration>& demos,
                          const ApiRecord& record, std::size_t max_chars) {
    bool has_required = false;
    bool has_free = false;
    for (const auto& d : demos) {
        has_required |= d.permission_required;
        has_free |= !d.permission_required;
    }
    if (!has_required || !has_free) {
        throw PermapError(ErrorCode::prompt_error,
                          "demonstration set needs at least one permission-required and one "
                          "permission-free example");
    }

    PromptBundle bundle;
    bundle.role_profile = role;
    bundle.demonstrations = demos;
    bundle.target_signature = record.signature.dotted();
    bundle.target_doc_comment = record.doc_comment;
    bundle.target_body = record.body_text;
    bundle.sdk_version = record.api_level;

    std::string text = role.instruction;
    text += "\n\n";
    int idx = 0;
    for (const auto& d : demos) {
        ++idx;
        text += "Demonstration " + std::to_string(idx);
        if (d.permission_required) {
            text += " [permission-required:";
            bool first = true;
            for (const auto& p : d.permissions) {
                text += first ? " " : ", ";
                text += p;
                first = false;
            }
            text += "]";
        } else {
            text += " [permission-free]";
        }
        text += "\nComment: ";
        text += d.comment.empty() ? "(none)" : d.comment;
        text += "\nCode:\n";
        text += d.code_snippet;
        if (text.empty() || text.back() != '\n') text += "\n";
        text += "\n";
    }
    text += "Target method (SDK " + std::to_string(bundle.sdk_version) + "): ";
    text += bundle.target_signature;
    text += "\nComment: ";
    text += bundle.target_doc_comment.empty() ? "(none)" : bundle.target_doc_comment;
    text += "\nCode:\n";
    text += bundle.target_body.empty() ? "(none)" : bundle.target_body;
    if (text.back() != '\n') text += "\n";
    text += "\nRespond with exactly one JSON object of the form "
            "{\"requires_permission\": true|false, \"permissions\": "
            "[\"android.permission.NAME\", ...], \"rationale\": \"short reason\"}.\n";

    if (text.size() > max_chars) {
        throw PermapError(ErrorCode::prompt_error,
                          "rendered prompt exceeds limit (" + std::to_string(text.size()) + " > " +
                              std::to_string(max_chars) + " chars)");
    }
    bundle.rendered = std::move(text);
    return bundle;
}

} // namespace permap

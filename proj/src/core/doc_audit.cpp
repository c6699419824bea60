#include "core/doc_audit.hpp"

#include "core/canonical.hpp"
#include "core/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace permap {

namespace fs = std::filesystem;
using nlohmann::json;

std::string SignatureKey::to_string() const {
    return fq_class + "#" + name + "/" + std::to_string(arity);
}

const char* to_string(DeclarationKind k) {
    switch (k) {
        case DeclarationKind::standardized: return "standardized";
        case DeclarationKind::non_standardized: return "non_standardized";
        case DeclarationKind::absent: return "absent";
    }
    return "absent";
}

namespace {

// Single-word permission constants that carry no underscore.
const std::set<std::string> kBareWordPermissions = {
    "CAMERA", "INTERNET", "NFC", "BLUETOOTH", "VIBRATE", "FLASHLIGHT",
};

// `fq_class#name(params)` -> key with arity; throws on malformed input.
SignatureKey parse_signature_string(const std::string& sig) {
    const auto hash = sig.find('#');
    const auto paren = sig.find('(', hash == std::string::npos ? 0 : hash);
    if (hash == std::string::npos || paren == std::string::npos || !sig.ends_with(")")) {
        throw PermapError(ErrorCode::load_error, "malformed signature: " + sig);
    }
    SignatureKey key;
    key.fq_class = sig.substr(0, hash);
    key.name = sig.substr(hash + 1, paren - hash - 1);
    const std::string params = sig.substr(paren + 1, sig.size() - paren - 2);
    if (params.empty()) {
        key.arity = 0;
    } else {
        key.arity = 1 + static_cast<int>(std::count(params.begin(), params.end(), ','));
    }
    return key;
}

DocRecord classify_page(SignatureKey key, const std::string& marker_block,
                        const std::string& description, std::string source_page) {
    DocRecord rec;
    rec.signature_key = std::move(key);
    rec.source_page = std::move(source_page);
    if (!marker_block.empty()) {
        rec.permissions_mentioned = scan_doc_permission_mentions(marker_block);
        if (!rec.permissions_mentioned.empty()) {
            rec.declaration_kind = DeclarationKind::standardized;
            return rec;
        }
    }
    rec.permissions_mentioned = scan_doc_permission_mentions(description);
    rec.declaration_kind = rec.permissions_mentioned.empty() ? DeclarationKind::absent
                                                             : DeclarationKind::non_standardized;
    return rec;
}

std::vector<DocRecord> ingest_json_page(const fs::path& file) {
    std::ifstream in(file);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw PermapError(ErrorCode::load_error, "not valid JSON");
    }
    std::vector<DocRecord> out;
    const auto one = [&](const json& page) {
        SignatureKey key = parse_signature_string(page.at("signature").get<std::string>());
        std::string marker;
        if (page.contains("requires_permission_block")) {
            const auto& block = page["requires_permission_block"];
            if (block.is_array()) {
                for (const auto& p : block) marker += p.get<std::string>() + " ";
            } else if (block.is_string()) {
                marker = block.get<std::string>();
            }
        }
        std::string description;
        if (page.contains("description")) description = page["description"].get<std::string>();
        out.push_back(classify_page(std::move(key), marker, description, file.filename().string()));
    };
    if (j.is_array()) {
        for (const auto& page : j) one(page);
    } else if (j.is_object()) {
        one(j);
    } else {
        throw PermapError(ErrorCode::load_error, "page must be an object or array");
    }
    return out;
}

std::string strip_tags(const std::string& html) {
    std::string out;
    bool in_tag = false;
    for (char c : html) {
        if (c == '<') in_tag = true;
        else if (c == '>') in_tag = false;
        else if (!in_tag) out.push_back(c);
    }
    return out;
}

std::vector<DocRecord> ingest_html_page(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string html = buf.str();

    constexpr std::string_view kAttr = "data-signature=\"";
    std::vector<DocRecord> out;
    std::size_t pos = html.find(kAttr);
    if (pos == std::string::npos) {
        throw PermapError(ErrorCode::load_error, "no data-signature entries");
    }
    while (pos != std::string::npos) {
        const std::size_t sig_begin = pos + kAttr.size();
        const std::size_t sig_end = html.find('"', sig_begin);
        if (sig_end == std::string::npos) {
            throw PermapError(ErrorCode::load_error, "unterminated data-signature attribute");
        }
        const std::string sig = html.substr(sig_begin, sig_end - sig_begin);
        const std::size_t next = html.find(kAttr, sig_end);
        const std::string chunk =
            html.substr(sig_end, (next == std::string::npos ? html.size() : next) - sig_end);

        const std::string text = strip_tags(chunk);
        std::string marker;
        std::string description;
        constexpr std::string_view kMarker = "RequiresPermission:";
        if (const auto m = text.find(kMarker); m != std::string::npos) {
            const auto eol = text.find('\n', m);
            marker = text.substr(m + kMarker.size(),
                                 eol == std::string::npos ? std::string::npos : eol - m - kMarker.size());
            description = text.substr(0, m);
            if (eol != std::string::npos) description += text.substr(eol);
        } else {
            description = text;
        }
        out.push_back(classify_page(parse_signature_string(sig), marker, description,
                                    file.filename().string()));
        pos = next;
    }
    return out;
}

} // namespace

std::set<std::string> scan_doc_permission_mentions(std::string_view text) {
    std::set<std::string> out = scan_permission_tokens(text);
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                         text[j] == '.')) {
            ++j;
        }
        std::string_view token = text.substr(i, j - i);
        i = j;
        if (token.find('.') != std::string_view::npos) continue;  // dotted: grammar scan owns it
        bool upper_snake = !token.empty() && std::isupper(static_cast<unsigned char>(token.front()));
        for (char t : token) {
            upper_snake &= std::isupper(static_cast<unsigned char>(t)) ||
                           std::isdigit(static_cast<unsigned char>(t)) || t == '_';
        }
        if (!upper_snake) continue;
        const bool has_underscore = token.find('_') != std::string_view::npos;
        if (has_underscore || kBareWordPermissions.contains(std::string(token))) {
            if (auto canonical = try_canonicalize_permission(token)) out.insert(std::move(*canonical));
        }
    }
    return out;
}

IngestResult ingest_doc_dump(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec) || ec) {
        throw PermapError(ErrorCode::load_error, "doc dump is not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.ends_with(".docrec.json") || name.ends_with(".html")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    IngestResult result;
    for (const fs::path& file : files) {
        try {
            std::vector<DocRecord> page = file.extension() == ".html" ? ingest_html_page(file)
                                                                      : ingest_json_page(file);
            for (auto& rec : page) result.records.push_back(std::move(rec));
        } catch (const PermapError& e) {
            result.warnings.push_back(file.filename().string() + ": " + e.what());
        }
    }
    return result;
}

GapReport annotation_gap(const MappingStore& store) {
    GapReport report;
    report.sdk_version = store.sdk_version();

    std::set<std::string> annotated;
    for (const auto& r : store.records()) {
        if (!r.declared_permissions.empty()) annotated.insert(r.api_id);
    }
    std::set<std::string> discovered;
    for (const auto& [api_id, m] : store.mappings()) discovered.insert(api_id);

    report.discovered_total = discovered.size();
    report.annotated_total = annotated.size();

    std::set<std::string> all = annotated;
    all.insert(discovered.begin(), discovered.end());
    for (const auto& api_id : all) {
        const bool a = annotated.contains(api_id);
        const bool d = discovered.contains(api_id);
        if (a && d) {
            report.itemized.push_back({api_id, "annotated_and_discovered"});
        } else if (a) {
            report.itemized.push_back({api_id, "annotated_only"});
        } else {
            report.itemized.push_back({api_id, "new_discovery"});
            ++report.new_discoveries;
        }
    }
    return report;
}

GapReport doc_gap(const MappingStore& store, const std::vector<DocRecord>& docs) {
    GapReport report;
    report.sdk_version = store.sdk_version();

    std::map<SignatureKey, std::vector<std::string>> by_key;
    for (const auto& r : store.records()) {
        by_key[{r.signature.fq_class, r.signature.name,
                static_cast<int>(r.signature.param_types.size())}]
            .push_back(r.api_id);
    }

    std::set<std::string> discovered;
    for (const auto& [api_id, m] : store.mappings()) discovered.insert(api_id);
    report.discovered_total = discovered.size();

    // Annotated side: standardized docs resolved to api_ids where the join is
    // unambiguous. Doc-only keys still count as annotated.
    std::set<std::string> annotated_api_ids;
    std::set<std::string> doc_only_keys;
    std::set<std::string> seen_keys;
    for (const auto& doc : docs) {
        if (doc.declaration_kind == DeclarationKind::non_standardized) {
            report.non_standardized.push_back(doc.signature_key.to_string());
            continue;
        }
        if (doc.declaration_kind != DeclarationKind::standardized) continue;
        if (!seen_keys.insert(doc.signature_key.to_string()).second) continue;
        const auto it = by_key.find(doc.signature_key);
        if (it == by_key.end()) {
            doc_only_keys.insert(doc.signature_key.to_string());
            continue;
        }
        if (it->second.size() > 1) {
            report.ambiguous.push_back(doc.signature_key.to_string());
            continue;
        }
        annotated_api_ids.insert(it->second.front());
    }
    std::sort(report.non_standardized.begin(), report.non_standardized.end());

    report.annotated_total = annotated_api_ids.size() + doc_only_keys.size();

    std::set<std::string> all = annotated_api_ids;
    all.insert(discovered.begin(), discovered.end());
    for (const auto& api_id : all) {
        const bool a = annotated_api_ids.contains(api_id);
        const bool d = discovered.contains(api_id);
        if (a && d) {
            report.itemized.push_back({api_id, "annotated_and_discovered"});
        } else if (a) {
            report.itemized.push_back({api_id, "annotated_only"});
        } else {
            report.itemized.push_back({api_id, "new_discovery"});
            ++report.new_discoveries;
        }
    }
    for (const auto& key : doc_only_keys) {
        report.itemized.push_back({key, "annotated_only"});
    }
    return report;
}

json to_json(const GapReport& report) {
    json j;
    j["sdk_version"] = report.sdk_version;
    j["discovered_total"] = report.discovered_total;
    j["annotated_total"] = report.annotated_total;
    j["new_discoveries"] = report.new_discoveries;
    json items = json::array();
    for (const auto& item : report.itemized) {
        items.push_back({{"id", item.id}, {"status", item.status}});
    }
    j["itemized"] = items;
    j["ambiguous"] = report.ambiguous;
    j["non_standardized"] = report.non_standardized;
    return j;
}

std::string render_text(const GapReport& report, const std::string& title) {
    std::ostringstream out;
    out << title << " (SDK " << report.sdk_version << ")\n";
    out << "  discovered:      " << report.discovered_total << "\n";
    out << "  annotated:       " << report.annotated_total << "\n";
    out << "  new discoveries: " << report.new_discoveries << "\n";
    if (!report.ambiguous.empty()) {
        out << "  ambiguous joins: " << report.ambiguous.size() << "\n";
    }
    if (!report.non_standardized.empty()) {
        out << "  non-standardized docs: " << report.non_standardized.size() << "\n";
    }
    return out.str();
}

} // namespace permap

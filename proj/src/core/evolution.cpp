#include "core/evolution.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace permap {

using nlohmann::json;

OverlapReport overlap_sets(const std::set<std::string>& ours, const std::set<std::string>& baseline) {
    OverlapReport r;
    r.our_total = ours.size();
    r.baseline_total = baseline.size();
    for (const auto& key : ours) {
        if (baseline.contains(key)) ++r.same;
    }
    r.ours_only = r.our_total - r.same;
    r.baseline_only = r.baseline_total - r.same;
    return r;
}

namespace {

std::set<std::string> mapping_keys(const MappingStore& store, bool jni_only) {
    std::set<std::string> keys;
    for (const auto& [api_id, mapping] : store.mappings()) {
        const ApiRecord* record = store.find_record(api_id);
        if (!record) continue;
        if (jni_only && !record->is_jni) continue;
        keys.insert(record->signature.key());
    }
    return keys;
}

std::string package_of(const std::string& fq_class) {
    const auto dot = fq_class.rfind('.');
    return dot == std::string::npos ? std::string() : fq_class.substr(0, dot);
}

} // namespace

OverlapReport overlap_report(const MappingStore& store, const std::set<std::string>& baseline_keys,
                             bool jni_only) {
    return overlap_sets(mapping_keys(store, jni_only), baseline_keys);
}

std::string normalize_baseline_line(const std::string& line) {
    std::string s;
    for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty() || s.front() == '#') return {};
    if (s.find('#') == std::string::npos) {
        // `a.b.C.m(...)` or `a.b.C.m`: the method is the last dotted segment
        // before the parameter list.
        const auto paren = s.find('(');
        const auto stop = paren == std::string::npos ? s.size() : paren;
        const auto dot = s.rfind('.', stop == 0 ? 0 : stop - 1);
        if (dot == std::string::npos) {
            throw PermapError(ErrorCode::load_error, "cannot normalize baseline line: " + line);
        }
        s[dot] = '#';
    }
    if (s.find('(') == std::string::npos) s += "()";
    if (!s.ends_with(")")) {
        throw PermapError(ErrorCode::load_error, "cannot normalize baseline line: " + line);
    }
    return s;
}

std::set<std::string> load_baseline_keys(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw PermapError(ErrorCode::load_error, "cannot open baseline file: " + file.string());
    }
    std::set<std::string> keys;
    std::string line;
    while (std::getline(in, line)) {
        std::string key = normalize_baseline_line(line);
        if (!key.empty()) keys.insert(std::move(key));
    }
    return keys;
}

PackageDistribution distribution(const MappingStore& store) {
    PackageDistribution dist;
    for (const auto& [api_id, mapping] : store.mappings()) {
        const ApiRecord* record = store.find_record(api_id);
        if (!record) continue;
        ++dist.per_package[record->top_package];
        ++dist.total;
    }
    return dist;
}

VersionDiff diff_versions(const MappingStore& a, const MappingStore& b) {
    VersionDiff diff;
    const std::set<std::string> keys_a = mapping_keys(a, false);
    const std::set<std::string> keys_b = mapping_keys(b, false);
    for (const auto& k : keys_a) {
        if (keys_b.contains(k)) diff.retained.insert(k);
        else diff.removed.insert(k);
    }
    for (const auto& k : keys_b) {
        if (!keys_a.contains(k)) diff.added.insert(k);
    }
    for (const auto& k : keys_a) {
        const std::string pkg = package_of(k.substr(0, k.find('#')));
        ++diff.per_package[pkg].first;
    }
    for (const auto& k : keys_b) {
        const std::string pkg = package_of(k.substr(0, k.find('#')));
        ++diff.per_package[pkg].second;
    }
    return diff;
}

json to_json(const OverlapReport& r) {
    return json{{"our_total", r.our_total},
                {"baseline_total", r.baseline_total},
                {"same", r.same},
                {"ours_only", r.ours_only},
                {"baseline_only", r.baseline_only}};
}

json to_json(const PackageDistribution& d) {
    json per = json::object();
    for (const auto& [pkg, count] : d.per_package) per[pkg] = count;
    return json{{"per_package", per}, {"total", d.total}};
}

json to_json(const VersionDiff& d) {
    json per = json::object();
    for (const auto& [pkg, counts] : d.per_package) {
        per[pkg] = json{{"before", counts.first},
                        {"after", counts.second},
                        {"delta", static_cast<long long>(counts.second) -
                                      static_cast<long long>(counts.first)}};
    }
    return json{{"added", std::vector<std::string>(d.added.begin(), d.added.end())},
                {"removed", std::vector<std::string>(d.removed.begin(), d.removed.end())},
                {"retained", std::vector<std::string>(d.retained.begin(), d.retained.end())},
                {"per_package", per}};
}

std::string render_text(const OverlapReport& r, const std::string& title) {
    std::ostringstream out;
    out << title << "\n";
    out << "  ours:          " << r.our_total << "\n";
    out << "  baseline:      " << r.baseline_total << "\n";
    out << "  same:          " << r.same << "\n";
    out << "  ours only:     " << r.ours_only << "\n";
    out << "  baseline only: " << r.baseline_only << "\n";
    return out.str();
}

std::string render_text(const PackageDistribution& d, const std::string& title) {
    std::ostringstream out;
    out << title << "\n";
    std::size_t width = 7;
    for (const auto& [pkg, count] : d.per_package) width = std::max(width, pkg.size());
    for (const auto& [pkg, count] : d.per_package) {
        out << "  " << pkg << std::string(width - pkg.size() + 2, ' ') << count << "\n";
    }
    out << "  " << "total" << std::string(width - 5 + 2, ' ') << d.total << "\n";
    return out.str();
}

std::string render_text(const VersionDiff& d, const std::string& title) {
    std::ostringstream out;
    out << title << "\n";
    out << "  added:    " << d.added.size() << "\n";
    out << "  removed:  " << d.removed.size() << "\n";
    out << "  retained: " << d.retained.size() << "\n";
    for (const auto& [pkg, counts] : d.per_package) {
        const long long delta = static_cast<long long>(counts.second) -
                                static_cast<long long>(counts.first);
        out << "  " << (pkg.empty() ? "(default)" : pkg) << ": " << counts.first << " -> "
            << counts.second << " (" << (delta >= 0 ? "+" : "") << delta << ")\n";
    }
    return out.str();
}

} // namespace permap

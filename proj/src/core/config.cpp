#include "core/config.hpp"

#include "core/errors.hpp"
#include "core/keyword_scan.hpp"
#include "core/testcase.hpp"

#include <cctype>
#include <fstream>

namespace permap {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Cuts a trailing comment, respecting quoted strings.
std::string cut_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& value, const std::string& context) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < value.size(); ++i) {
            if (value[i] == '\\' && i + 2 < value.size()) {
                ++i;
                switch (value[i]) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    default: out.push_back(value[i]);
                }
            } else {
                out.push_back(value[i]);
            }
        }
        return out;
    }
    if (value.empty()) {
        throw PermapError(ErrorCode::config_error, "empty value for " + context);
    }
    return value;
}

std::vector<std::string> parse_array(const std::string& value, const std::string& context) {
    std::vector<std::string> out;
    std::string item;
    bool in_string = false;
    for (std::size_t i = 1; i + 1 < value.size(); ++i) {
        const char c = value[i];
        if (c == '"' && value[i - 1] != '\\') {
            in_string = !in_string;
            continue;
        }
        if (!in_string && (c == ',' )) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
            item.clear();
            continue;
        }
        if (in_string) item.push_back(c);
        else if (!std::isspace(static_cast<unsigned char>(c))) {
            throw PermapError(ErrorCode::config_error, "malformed array for " + context);
        }
    }
    item = trim(item);
    if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

PipelineConfig PipelineConfig::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw PermapError(ErrorCode::config_error, "cannot open config file: " + file.string());
    }
    PipelineConfig cfg;
    cfg.base_dir_ = file.parent_path();

    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(cut_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw PermapError(ErrorCode::config_error,
                                  file.string() + ":" + std::to_string(line_no) + ": bad section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw PermapError(ErrorCode::config_error,
                              file.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw PermapError(ErrorCode::config_error,
                              file.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        if (!section.empty()) key = section + "." + key;
        if (value.front() == '[') {
            if (value.back() != ']') {
                throw PermapError(ErrorCode::config_error,
                                  file.string() + ":" + std::to_string(line_no) + ": unterminated array");
            }
            cfg.lists_[key] = parse_array(value, key);
        } else {
            cfg.values_[key] = unquote(value, key);
        }
    }
    return cfg;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    const std::string trimmed = trim(value);
    if (!trimmed.empty() && trimmed.front() == '[' && trimmed.back() == ']') {
        lists_[key] = parse_array(trimmed, key);
        values_.erase(key);
        return;
    }
    values_[key] = unquote(trimmed, key);
    lists_.erase(key);
}

bool PipelineConfig::has(const std::string& key) const {
    return values_.contains(key) || lists_.contains(key);
}

std::string PipelineConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long PipelineConfig::get_int(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stol(it->second);
    } catch (...) {
        throw PermapError(ErrorCode::config_error, "expected integer for " + key);
    }
}

double PipelineConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw PermapError(ErrorCode::config_error, "expected number for " + key);
    }
}

bool PipelineConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw PermapError(ErrorCode::config_error, "expected true/false for " + key);
}

std::vector<std::string> PipelineConfig::get_list(const std::string& key) const {
    const auto it = lists_.find(key);
    return it == lists_.end() ? std::vector<std::string>{} : it->second;
}

fs::path PipelineConfig::get_path(const std::string& key) const {
    const std::string value = get_string(key);
    if (value.empty()) return {};
    fs::path p = value;
    if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
    return p;
}

ProviderConfig PipelineConfig::provider() const {
    ProviderConfig pc;
    pc.provider_name = get_string("provider.name", pc.provider_name);
    pc.model_id = get_string("provider.model_id", pc.model_id);
    pc.endpoint = get_string("provider.endpoint", pc.endpoint);
    pc.credential_env = get_string("provider.credential_env", pc.credential_env);
    pc.max_in_flight = static_cast<int>(get_int("provider.max_in_flight", pc.max_in_flight));
    pc.timeout_seconds = get_double("provider.timeout_seconds", pc.timeout_seconds);
    pc.retries = static_cast<int>(get_int("provider.retries", pc.retries));
    pc.backoff_seconds = get_double("provider.backoff_seconds", pc.backoff_seconds);
    pc.prompt_char_limit = static_cast<std::size_t>(
        get_int("provider.prompt_char_limit", static_cast<long>(pc.prompt_char_limit)));
    pc.body_char_budget = static_cast<std::size_t>(
        get_int("provider.body_char_budget", static_cast<long>(pc.body_char_budget)));
    if (pc.max_in_flight < 1) {
        throw PermapError(ErrorCode::config_error, "provider.max_in_flight must be >= 1");
    }
    return pc;
}

std::vector<std::string> PipelineConfig::trigger_keywords() const {
    const auto list = get_list("keywords");
    return list.empty() ? default_trigger_keywords() : list;
}

std::vector<std::string> PipelineConfig::banned_tokens() const {
    const auto list = get_list("banned_tokens");
    return list.empty() ? default_banned_tokens() : list;
}

} // namespace permap

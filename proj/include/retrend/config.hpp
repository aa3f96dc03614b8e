#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retrend/errors.hpp"
#include "retrend/linking.hpp"

namespace retrend {

/// Plain "key = value" file with '#' comments; shared by pipeline configs
/// and synthetic-scenario descriptions.
class KeyValueFile {
public:
    static KeyValueFile load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path.string());
        KeyValueFile kv;
        kv.origin_ = path;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::string trimmed = trim(line);
            if (trimmed.empty() || trimmed[0] == '#') continue;
            const std::size_t eq = trimmed.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
            }
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
            }
            kv.values_[key] = value;
        }
        return kv;
    }

    const std::filesystem::path& origin() const { return origin_; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        return get(key).value_or(fallback);
    }

    std::string require(const std::string& key) const {
        auto v = get(key);
        if (!v) throw ConfigError(origin_.string() + ": missing required key '" + key + "'");
        return *v;
    }

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return {};
        std::size_t e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }

private:
    std::filesystem::path origin_;
    std::map<std::string, std::string> values_;
};

enum class GrangerMode { windowed, full };

/// Everything one analysis run needs. Paths in the file resolve relative to
/// the file's own directory; RETREND_CACHE_DIR overrides the cache location.
struct PipelineConfig {
    std::filesystem::path edges_path;
    std::filesystem::path songs_path;
    std::filesystem::path fixture_path;  // offline entity source (default)
    std::optional<std::string> endpoint_host;
    int endpoint_port = 80;
    std::string api_path = "/w/api.php";
    double requests_per_second = 2.0;
    std::filesystem::path cache_dir;
    std::filesystem::path out_dir = "out";
    double alpha = 0.05;
    int max_lag = 10;
    GrangerMode granger_mode = GrangerMode::windowed;
    unsigned jobs = 1;
    double similarity_threshold = 0.55;
    std::set<std::string> allowed_classes = default_allowed_classes();

    static PipelineConfig from_file(const std::filesystem::path& path) {
        const KeyValueFile kv = KeyValueFile::load(path);
        static const std::set<std::string> known = {
            "edges",   "songs",        "fixture",     "endpoint_host",  "endpoint_port",
            "api_path", "cache_dir",   "out_dir",     "alpha",          "max_lag",
            "granger_mode", "jobs",    "similarity_threshold", "allowed_classes",
            "requests_per_second"};
        for (const auto& [key, value] : kv.values()) {
            (void)value;
            if (!known.count(key)) {
                throw ConfigError(path.string() + ": unknown key '" + key + "'");
            }
        }

        const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
        auto resolve = [&](const std::string& p) -> std::filesystem::path {
            std::filesystem::path fp(p);
            return fp.is_absolute() ? fp : base / fp;
        };

        PipelineConfig config;
        config.edges_path = resolve(kv.require("edges"));
        config.songs_path = resolve(kv.require("songs"));
        if (auto fixture = kv.get("fixture")) config.fixture_path = resolve(*fixture);
        if (auto host = kv.get("endpoint_host")) config.endpoint_host = *host;
        config.endpoint_port = parse_int(kv.get_or("endpoint_port", "80"), "endpoint_port");
        config.api_path = kv.get_or("api_path", "/w/api.php");
        config.requests_per_second =
            parse_double(kv.get_or("requests_per_second", "2.0"), "requests_per_second");
        if (config.fixture_path.empty() && !config.endpoint_host) {
            throw ConfigError(path.string() + ": need either 'fixture' or 'endpoint_host'");
        }

        if (const char* env = std::getenv("RETREND_CACHE_DIR"); env && *env) {
            config.cache_dir = env;
        } else {
            config.cache_dir = resolve(kv.require("cache_dir"));
        }
        config.out_dir = resolve(kv.get_or("out_dir", "out"));

        config.alpha = parse_double(kv.get_or("alpha", "0.05"), "alpha");
        if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
            throw ConfigError("alpha must lie in (0, 1)");
        }
        config.max_lag = parse_int(kv.get_or("max_lag", "10"), "max_lag");
        if (config.max_lag < 1) throw ConfigError("max_lag must be >= 1");

        const std::string mode = kv.get_or("granger_mode", "windowed");
        if (mode == "windowed") {
            config.granger_mode = GrangerMode::windowed;
        } else if (mode == "full") {
            config.granger_mode = GrangerMode::full;
        } else {
            throw ConfigError("granger_mode must be 'windowed' or 'full', got '" + mode + "'");
        }

        const int jobs = parse_int(kv.get_or("jobs", "1"), "jobs");
        if (jobs < 0) throw ConfigError("jobs must be >= 0");
        config.jobs = static_cast<unsigned>(jobs);

        config.similarity_threshold =
            parse_double(kv.get_or("similarity_threshold", "0.55"), "similarity_threshold");
        if (auto classes = kv.get("allowed_classes")) {
            config.allowed_classes.clear();
            std::string item;
            for (char c : *classes + ",") {
                if (c == ',') {
                    const std::string cls = KeyValueFile::trim(item);
                    if (!cls.empty()) config.allowed_classes.insert(cls);
                    item.clear();
                } else {
                    item.push_back(c);
                }
            }
            if (config.allowed_classes.empty()) {
                throw ConfigError("allowed_classes must name at least one class");
            }
        }
        return config;
    }

private:
    static int parse_int(const std::string& text, const std::string& key) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
        }
    }

    static double parse_double(const std::string& text, const std::string& key) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
        }
    }
};

}  // namespace retrend

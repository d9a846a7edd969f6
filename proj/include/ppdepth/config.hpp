#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "error.hpp"
#include "log.hpp"

namespace ppdepth {

/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "PPDEPTH_OUTPUT_DIR";

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "kernel.family", "kernel.c1", "kernel.c2",
        "seed", "threads", "output.dir", "log.level", "simulate.lambda", "simulate.T",
        "depth.method", "depth.h", "depth.h_rule", "depth.C", "depth.p", "depth.leave_one_out", "depth.band_grid",
        "center.method", "center.n_max", "center.anneal_c", "center.dr", "center.sigma_move", "center.cooling",
        "sgd.batch", "sgd.rate", "sgd.epochs", "sgd.eps",
        "classify.folds", "classify.method", "classify.segments",
        "experiment.n", "experiment.top_k",
    };
    return keys;
}

/// Flat key = value settings. Later `set` calls override earlier ones, so
/// loading the file first and applying flags afterwards makes flags win.
class RunConfig {
public:
    static RunConfig parse(std::istream& in, const std::string& source = "config") {
        RunConfig cfg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto s = trim(line);
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw invalid_input(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
            const auto key = trim(s.substr(0, eq));
            const auto value = trim(s.substr(eq + 1));
            if (key.empty()) throw invalid_input(source + ":" + std::to_string(line_no) + ": empty key");
            if (!known_config_keys().count(key)) log::warn(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw invalid_input("cannot open config '" + path + "'");
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw invalid_input("config key '" + key + "': expected a number, got '" + it->second + "'");
        }
    }

    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            if (!it->second.empty() && it->second.front() == '-') throw std::invalid_argument("negative");
            const auto v = std::stoull(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw invalid_input("config key '" + key + "': expected a non-negative integer, got '" + it->second + "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const auto& v = it->second;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw invalid_input("config key '" + key + "': expected a boolean, got '" + v + "'");
    }

    /// output.dir, else $PPDEPTH_OUTPUT_DIR, else ".".
    std::string output_dir() const {
        if (has("output.dir")) return get("output.dir", ".");
        if (const char* env = std::getenv(output_dir_env); env && *env) return env;
        return ".";
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

} // namespace ppdepth

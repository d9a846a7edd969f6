#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "log.hpp"
#include "process.hpp"

namespace ppdepth {

enum class FileFormat { jsonl, text };

inline FileFormat parse_file_format(const std::string& s) {
    if (s == "jsonl" || s == "json") return FileFormat::jsonl;
    if (s == "text" || s == "txt") return FileFormat::text;
    throw invalid_input("unknown file format '" + s + "'");
}

/// jsonl unless the path ends in .txt.
inline FileFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && path.substr(dot) == ".txt") return FileFormat::text;
    return FileFormat::jsonl;
}

/// 17 significant digits: parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

namespace detail {

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline void finish_loaded(std::vector<PointProcess>& out, const std::vector<std::size_t>& line_of) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& p = out[i];
        if (p.id.empty()) p.id = indexed_id("p", i, out.size());
        for (double e : p.events) {
            if (!(std::isfinite(e) && e >= 0.0 && e <= p.T)) {
                throw invalid_input("line " + std::to_string(line_of[i]) + ": event " + format_double(e) +
                                    " outside [0, " + format_double(p.T) + "]");
            }
        }
        if (!std::is_sorted(p.events.begin(), p.events.end())) {
            log::warn("line " + std::to_string(line_of[i]) + ": events not sorted; sorting");
            std::sort(p.events.begin(), p.events.end());
        }
    }
}

inline double parse_number(const std::string& tok, std::size_t line_no) {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (!tok.empty() && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e)
        throw invalid_input("line " + std::to_string(line_no) + ": malformed number '" + tok + "'");
    return v;
}

} // namespace detail

/// Loads a JSONL file: a header line {"T": ...} then one
/// {"id", "label", "events"} object per line.
inline std::vector<PointProcess> load_jsonl(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<double> T;
    std::vector<PointProcess> out;
    std::vector<std::size_t> line_of;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw invalid_input("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
        }
        if (!j.is_object()) throw invalid_input("line " + std::to_string(line_no) + ": expected a JSON object");
        if (!T) {
            if (!j.contains("T") || !j["T"].is_number())
                throw invalid_input("line " + std::to_string(line_no) + ": first line must be a header {\"T\": ...}");
            T = j["T"].get<double>();
            if (!(std::isfinite(*T) && *T > 0.0))
                throw invalid_input("line " + std::to_string(line_no) + ": T must be positive");
            continue;
        }
        if (!j.contains("events") || !j["events"].is_array())
            throw invalid_input("line " + std::to_string(line_no) + ": missing \"events\" array");
        PointProcess p;
        p.T = *T;
        for (const auto& e : j["events"]) {
            if (!e.is_number()) throw invalid_input("line " + std::to_string(line_no) + ": non-numeric event");
            p.events.push_back(e.get<double>());
        }
        if (j.contains("id") && !j["id"].is_null()) {
            if (!j["id"].is_string()) throw invalid_input("line " + std::to_string(line_no) + ": id must be a string");
            p.id = j["id"].get<std::string>();
        }
        if (j.contains("label") && !j["label"].is_null()) {
            if (!j["label"].is_string())
                throw invalid_input("line " + std::to_string(line_no) + ": label must be a string");
            p.label = j["label"].get<std::string>();
        }
        out.push_back(std::move(p));
        line_of.push_back(line_no);
    }
    if (!T) throw invalid_input("empty JSONL input: missing {\"T\": ...} header");
    detail::finish_loaded(out, line_of);
    return out;
}

/// Loads the plain-text format: an optional "# T=<value>" header, then one
/// whitespace-separated line of event times per process (empty line = no events).
inline std::vector<PointProcess> load_text(std::istream& in, std::optional<double> T_override = std::nullopt) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<double> T = T_override;
    std::vector<PointProcess> out;
    std::vector<std::size_t> line_of;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') {
            const auto pos = line.find("T=");
            if (pos != std::string::npos && !T_override) {
                std::string v = line.substr(pos + 2);
                v.erase(0, v.find_first_not_of(" \t"));
                v.erase(v.find_last_not_of(" \t") + 1);
                T = detail::parse_number(v, line_no);
            }
            continue;
        }
        PointProcess p;
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) p.events.push_back(detail::parse_number(tok, line_no));
        out.push_back(std::move(p));
        line_of.push_back(line_no);
    }
    if (!T) throw invalid_input("text input: T unknown (add a '# T=<value>' header or pass T)");
    if (!(std::isfinite(*T) && *T > 0.0)) throw invalid_input("text input: T must be positive");
    for (auto& p : out) p.T = *T;
    detail::finish_loaded(out, line_of);
    return out;
}

inline std::vector<PointProcess> load_processes(const std::string& path, FileFormat fmt,
                                                std::optional<double> T_override = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open '" + path + "'");
    if (fmt == FileFormat::jsonl) {
        auto out = load_jsonl(in);
        if (T_override) {
            for (auto& p : out) p.T = *T_override;
            for (auto& p : out) p.validate();
        }
        return out;
    }
    return load_text(in, T_override);
}

inline std::vector<PointProcess> load_processes(const std::string& path) {
    return load_processes(path, format_from_path(path));
}

inline std::string events_json(const std::vector<double>& events) {
    std::string s = "[";
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (i) s += ',';
        s += format_double(events[i]);
    }
    return s + "]";
}

inline void save_jsonl(std::ostream& os, const std::vector<PointProcess>& ps, double T) {
    os << "{\"T\":" << format_double(T) << "}\n";
    for (const auto& p : ps) {
        os << "{\"id\":" << detail::json_string(p.id);
        if (p.label) os << ",\"label\":" << detail::json_string(*p.label);
        os << ",\"events\":" << events_json(p.events) << "}\n";
    }
}

inline void save_text(std::ostream& os, const std::vector<PointProcess>& ps, double T) {
    os << "# T=" << format_double(T) << '\n';
    for (const auto& p : ps) {
        for (std::size_t i = 0; i < p.events.size(); ++i) {
            if (i) os << ' ';
            os << format_double(p.events[i]);
        }
        os << '\n';
    }
}

/// Writes all processes; they must share one T.
inline void save_processes(const std::vector<PointProcess>& ps, const std::string& path, FileFormat fmt,
                           std::optional<double> T = std::nullopt) {
    double t = T ? *T : (ps.empty() ? 1.0 : ps.front().T);
    for (const auto& p : ps) require(p.T == t, "save_processes: processes have different T");
    std::ofstream os(path);
    if (!os) throw invalid_input("cannot write '" + path + "'");
    if (fmt == FileFormat::jsonl)
        save_jsonl(os, ps, t);
    else
        save_text(os, ps, t);
    if (!os) throw invalid_input("write failed for '" + path + "'");
}

} // namespace ppdepth

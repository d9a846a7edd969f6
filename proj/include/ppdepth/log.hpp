#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string_view>

namespace ppdepth::log {

enum class level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

namespace detail {
struct state {
    level threshold = level::warn;
    std::function<void(level, std::string_view)> sink;
    std::mutex mu;
};
inline state& global() {
    static state s;
    return s;
}
inline const char* tag(level l) {
    switch (l) {
    case level::debug: return "debug";
    case level::info: return "info";
    case level::warn: return "warn";
    case level::error: return "error";
    default: return "";
    }
}
} // namespace detail

inline void set_level(level l) { detail::global().threshold = l; }
inline level get_level() { return detail::global().threshold; }

/// Replace the sink (default: stderr). Pass an empty function to restore.
inline void set_sink(std::function<void(level, std::string_view)> sink) {
    auto& g = detail::global();
    std::lock_guard lock(g.mu);
    g.sink = std::move(sink);
}

inline void write(level l, std::string_view msg) {
    auto& g = detail::global();
    if (l < g.threshold) return;
    std::lock_guard lock(g.mu);
    if (g.sink) {
        g.sink(l, msg);
    } else {
        std::cerr << "[ppdepth " << detail::tag(l) << "] " << msg << '\n';
    }
}

inline void debug(std::string_view m) { write(level::debug, m); }
inline void info(std::string_view m) { write(level::info, m); }
inline void warn(std::string_view m) { write(level::warn, m); }

} // namespace ppdepth::log

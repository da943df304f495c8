#include "horizonlab/app/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace horizonlab::app {

namespace {

std::atomic<int> g_level{-1};
std::mutex g_mutex;

const char* name(LogLevel l) {
    switch (l) {
        case LogLevel::quiet: return "quiet";
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

LogLevel from_env() {
    const char* v = std::getenv("HORIZONLAB_LOG");
    if (!v || !*v) return LogLevel::warn;
    const std::string s(v);
    for (LogLevel l : {LogLevel::quiet, LogLevel::error, LogLevel::warn, LogLevel::info, LogLevel::debug})
        if (s == name(l)) return l;
    std::lock_guard lock(g_mutex);
    std::cerr << "[horizonlab warn] HORIZONLAB_LOG=" << s << " is not one of quiet, error, warn, info, debug\n";
    return LogLevel::warn;
}

}  // namespace

LogLevel log_level() {
    int l = g_level.load();
    if (l < 0) {
        l = static_cast<int>(from_env());
        g_level.store(l);
    }
    return static_cast<LogLevel>(l);
}

void set_log_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

void log(LogLevel level, const std::string& message) {
    if (level == LogLevel::quiet || static_cast<int>(level) > static_cast<int>(log_level())) return;
    std::lock_guard lock(g_mutex);
    std::cerr << "[horizonlab " << name(level) << "] " << message << '\n';
}

}  // namespace horizonlab::app

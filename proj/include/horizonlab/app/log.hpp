#pragma once

#include <string>

namespace horizonlab::app {

enum class LogLevel { quiet = 0, error = 1, warn = 2, info = 3, debug = 4 };

/// Level from HORIZONLAB_LOG (quiet, error, warn, info, debug); warn when
/// unset.  An unknown value falls back to warn with a warning.
LogLevel log_level();
void set_log_level(LogLevel level);

/// Writes "[horizonlab level] message" to stderr when `level` is enabled.
void log(LogLevel level, const std::string& message);

}  // namespace horizonlab::app
